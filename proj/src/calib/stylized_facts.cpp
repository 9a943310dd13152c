#include "lobsim/calib/stylized_facts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace lobsim {

Histogram Histogram::uniform_edges(double lo, double hi, std::size_t bins) {
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    h.probs.assign(bins, 0.0);
    return h;
}

void Histogram::fill(std::span<const double> values) {
    std::fill(probs.begin(), probs.end(), 0.0);
    if (values.empty() || probs.empty()) return;
    for (double v : values) {
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        auto idx = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(probs.size()) - 1);
        probs[static_cast<std::size_t>(idx)] += 1.0;
    }
    for (double& p : probs) p /= static_cast<double>(values.size());
}

AcfCurve autocorrelation(std::span<const double> x, int max_lag) {
    AcfCurve c;
    c.values.assign(static_cast<std::size_t>(std::max(0, max_lag)), 0.0);
    const auto n = x.size();
    if (n < 2) {
        c.degenerate = true;
        return c;
    }
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    if (var <= 1e-12 * static_cast<double>(n)) {
        c.degenerate = true;
        return c;
    }
    for (int k = 1; k <= max_lag; ++k) {
        if (static_cast<std::size_t>(k) >= n) break;
        double s = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) s += (x[t] - mean) * (x[t - static_cast<std::size_t>(k)] - mean);
        const double lagged = s / static_cast<double>(n - static_cast<std::size_t>(k));
        c.values[static_cast<std::size_t>(k - 1)] = std::clamp(lagged / (var / static_cast<double>(n)), -1.0, 1.0);
    }
    return c;
}

StylizedFacts compute_stylized_facts(const FactsInput& in, const FactsGrid& g) {
    const auto sps = static_cast<std::size_t>(g.steps_per_second);
    if (sps == 0) throw ConfigError("facts grid needs a positive steps-per-second");
    if (in.mids.size() < 2 * 60 * sps) {
        throw DomainError(fmt::format("series of {} steps is shorter than two minutes", in.mids.size()));
    }
    StylizedFacts f;
    f.limit_per_minute.assign(in.limit_per_minute.begin(), in.limit_per_minute.end());
    f.market_per_minute.assign(in.market_per_minute.begin(), in.market_per_minute.end());

    // Mid sampled at the end of every second and every minute.
    auto sample = [&](std::size_t every) {
        std::vector<double> s;
        for (std::size_t t = every - 1; t < in.mids.size(); t += every) s.push_back(in.mids[t]);
        return s;
    };
    auto diffs = [](const std::vector<double>& s) {
        std::vector<double> d;
        for (std::size_t i = 1; i < s.size(); ++i) d.push_back(s[i] - s[i - 1]);
        return d;
    };
    auto absolute = [](std::vector<double> d) {
        for (double& v : d) v = std::abs(v);
        return d;
    };
    auto r1 = diffs(sample(sps));
    auto r60 = diffs(sample(60 * sps));
    auto a1 = absolute(r1);
    auto a60 = absolute(r60);

    const auto bins = g.return_bins;
    f.return_1s = Histogram::uniform_edges(-g.return_1s_range, g.return_1s_range, bins);
    f.return_1s.fill(r1);
    f.abs_return_1s = Histogram::uniform_edges(0.0, g.return_1s_range, bins / 2);
    f.abs_return_1s.fill(a1);
    f.return_60s = Histogram::uniform_edges(-g.return_60s_range, g.return_60s_range, bins);
    f.return_60s.fill(r60);
    f.abs_return_60s = Histogram::uniform_edges(0.0, g.return_60s_range, bins / 2);
    f.abs_return_60s.fill(a60);

    // Spread bins centred on whole ticks 1..spread_max.
    f.spread = Histogram::uniform_edges(0.5, g.spread_max + 0.5, static_cast<std::size_t>(g.spread_max));
    std::vector<double> sp;
    sp.reserve(in.spreads.size() / sps + 1);
    for (std::size_t t = sps - 1; t < in.spreads.size(); t += sps) sp.push_back(static_cast<double>(in.spreads[t]));
    f.spread.fill(sp);

    f.acf_return_1s = autocorrelation(r1, g.lags_1s);
    f.acf_abs_return_1s = autocorrelation(a1, g.lags_1s);
    f.acf_return_60s = autocorrelation(r60, g.lags_60s);
    f.acf_abs_return_60s = autocorrelation(a60, g.lags_60s);
    std::vector<double> signs(in.order_signs.begin(), in.order_signs.end());
    f.acf_order_sign = autocorrelation(signs, g.lags_sign);
    return f;
}

double wasserstein1(const Histogram& a, const Histogram& b) {
    if (!a.same_grid(b) || a.probs.size() != b.probs.size()) throw DomainError("histograms on different grids");
    double cdf_a = 0.0, cdf_b = 0.0, w = 0.0;
    for (std::size_t i = 0; i < a.probs.size(); ++i) {
        cdf_a += a.probs[i];
        cdf_b += b.probs[i];
        w += std::abs(cdf_a - cdf_b) * (a.edges[i + 1] - a.edges[i]);
    }
    return w;
}

double rmse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError(fmt::format("curves of length {} and {} differ", a.size(), b.size()));
    if (a.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(a.size()));
}

double facts_distance(const StylizedFacts& a, const StylizedFacts& b, const FactsWeights& w) {
    double d = 0.0;
    d += w.limit_rate * rmse(a.limit_per_minute, b.limit_per_minute);
    d += w.market_rate * rmse(a.market_per_minute, b.market_per_minute);
    d += w.spread * wasserstein1(a.spread, b.spread);
    d += w.return_1s * wasserstein1(a.return_1s, b.return_1s);
    d += w.abs_return_1s * wasserstein1(a.abs_return_1s, b.abs_return_1s);
    d += w.return_60s * wasserstein1(a.return_60s, b.return_60s);
    d += w.abs_return_60s * wasserstein1(a.abs_return_60s, b.abs_return_60s);
    d += w.acf_return_1s * rmse(a.acf_return_1s.values, b.acf_return_1s.values);
    d += w.acf_abs_return_1s * rmse(a.acf_abs_return_1s.values, b.acf_abs_return_1s.values);
    d += w.acf_return_60s * rmse(a.acf_return_60s.values, b.acf_return_60s.values);
    d += w.acf_abs_return_60s * rmse(a.acf_abs_return_60s.values, b.acf_abs_return_60s.values);
    d += w.acf_order_sign * rmse(a.acf_order_sign.values, b.acf_order_sign.values);
    return d;
}

}  // namespace lobsim
