#include "lobsim/calib/impact_fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <fmt/format.h>

namespace lobsim {

namespace {

struct PowerLawResidual {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    std::span<const ImpactSample> samples;

    int inputs() const { return 2; }
    int values() const { return static_cast<int>(samples.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            double q = std::abs(s.excess_demand);
            double model = q > 0.0 ? std::copysign(x[0] * std::pow(q, x[1]), s.excess_demand) : 0.0;
            fvec[static_cast<Eigen::Index>(i)] = s.price_change - model;
        }
        return 0;
    }
    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& fjac) const {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            double q = std::abs(s.excess_demand);
            auto r = static_cast<Eigen::Index>(i);
            if (q <= 0.0) {
                fjac(r, 0) = 0.0;
                fjac(r, 1) = 0.0;
                continue;
            }
            double sign = s.excess_demand > 0.0 ? 1.0 : -1.0;
            double pw = std::pow(q, x[1]);
            fjac(r, 0) = -sign * pw;
            fjac(r, 1) = -sign * x[0] * pw * std::log(q);
        }
        return 0;
    }
};

double r_squared(double ssr, double sst) { return sst > 0.0 ? 1.0 - ssr / sst : 0.0; }

double price_space_r2(std::span<const ImpactSample> samples, const ImpactModel& m) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.price_change;
    mean /= static_cast<double>(samples.size());
    double ssr = 0.0, sst = 0.0;
    for (const auto& s : samples) {
        double e = s.price_change - m.signed_impact(s.excess_demand);
        ssr += e * e;
        sst += (s.price_change - mean) * (s.price_change - mean);
    }
    return r_squared(ssr, sst);
}

}  // namespace

ImpactFit fit_impact_samples(std::span<const ImpactSample> samples, std::optional<double> fixed_exponent) {
    std::size_t nonzero = 0;
    for (const auto& s : samples) nonzero += s.excess_demand != 0.0;
    if (nonzero == 0) throw DomainError("impact fit: every window has zero excess demand");
    if (nonzero < kMinImpactWindows) {
        throw DomainError(fmt::format("impact fit needs {} windows with nonzero excess demand, got {}",
                                      kMinImpactWindows, nonzero));
    }

    ImpactFit fit;
    fit.windows = samples.size();

    // Log-log regression on sign-consistent windows.
    std::vector<double> xs, ys;
    for (const auto& s : samples) {
        double moved = s.excess_demand > 0.0 ? s.price_change : -s.price_change;
        if (s.excess_demand != 0.0 && moved > 0.0) {
            xs.push_back(std::log(std::abs(s.excess_demand)));
            ys.push_back(std::log(moved));
        }
    }
    fit.sign_consistent = xs.size();
    if (xs.size() >= 3) {
        const double n = static_cast<double>(xs.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= n;
        my /= n;
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        double slope = 0.0;
        if (fixed_exponent) {
            slope = *fixed_exponent;
        } else if (sxx > 0.0) {
            slope = sxy / sxx;
        }
        double intercept = my - slope * mx;
        fit.loglog = {std::exp(intercept), slope};
        double ssr = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double e = ys[i] - intercept - slope * xs[i];
            ssr += e * e;
        }
        fit.r2_loglog = r_squared(ssr, syy);
        fit.loglog_ok = (sxx > 0.0 || fixed_exponent) && fit.loglog.valid();
    }

    // Direct nonlinear least squares on all windows.
    if (fixed_exponent) {
        double num = 0.0, den = 0.0;
        for (const auto& s : samples) {
            double q = std::abs(s.excess_demand);
            if (q <= 0.0) continue;
            double basis = std::copysign(std::pow(q, *fixed_exponent), s.excess_demand);
            num += basis * s.price_change;
            den += basis * basis;
        }
        fit.nls = {den > 0.0 ? num / den : 0.0, *fixed_exponent};
        fit.nls_ok = fit.nls.valid();
    } else {
        Eigen::VectorXd x(2);
        if (fit.loglog_ok) {
            x << fit.loglog.scale, fit.loglog.exponent;
        } else {
            double mp = 0.0, mq = 0.0;
            for (const auto& s : samples) {
                mp += std::abs(s.price_change);
                mq += std::sqrt(std::abs(s.excess_demand));
            }
            x << (mq > 0.0 ? mp / mq : 1.0), 0.5;
        }
        PowerLawResidual functor{samples};
        Eigen::LevenbergMarquardt<PowerLawResidual> lm(functor);
        lm.parameters.maxfev = 2000;
        lm.minimize(x);
        fit.nls = {x[0], x[1]};
        fit.nls_ok = std::isfinite(x[0]) && std::isfinite(x[1]) && fit.nls.valid();
    }
    if (fit.nls_ok) fit.r2_nls = price_space_r2(samples, fit.nls);

    // A fixed exponent leaves a linear problem with an exact least-squares scale.
    if (fixed_exponent && fit.nls_ok) {
        fit.model = fit.nls;
        fit.method = "nls";
    } else if (fit.loglog_ok) {
        fit.model = fit.loglog;
        fit.method = "loglog";
    } else if (fit.nls_ok) {
        fit.model = fit.nls;
        fit.method = "nls";
    } else {
        throw DomainError("impact fit produced no valid power law");
    }
    return fit;
}

namespace {

/// Mid prevailing strictly before `ts`, or nullopt when no two-sided
/// snapshot precedes it.
std::optional<double> mid_before(std::span<const L2Row> l2, std::int64_t ts) {
    auto it = std::lower_bound(l2.begin(), l2.end(), ts, [](const L2Row& r, std::int64_t t) { return r.ts_ns < t; });
    while (it != l2.begin()) {
        --it;
        if (it->snapshot.has_mid) return it->snapshot.mid;
    }
    return std::nullopt;
}

}  // namespace

std::vector<ImpactSample> impact_samples(std::span<const HistoricalMarketOrder> market_orders,
                                         std::span<const L2Row> l2, std::int64_t window_ns) {
    if (window_ns <= 0) throw ConfigError("impact window must be positive");
    std::map<std::int64_t, double> demand;
    for (const auto& m : market_orders) {
        demand[m.time_ns / window_ns] += side_sign(m.side) * static_cast<double>(m.volume);
    }
    std::vector<ImpactSample> out;
    out.reserve(demand.size());
    for (const auto& [w, q] : demand) {
        auto a = mid_before(l2, w * window_ns);
        auto b = mid_before(l2, (w + 1) * window_ns);
        if (!a || !b) continue;
        out.push_back({q, *b - *a});
    }
    return out;
}

std::vector<ImpactSample> impact_samples(const PathRecord& path, Step window_steps) {
    if (window_steps <= 0) throw ConfigError("impact window must be positive");
    std::map<Step, double> demand;
    for (const auto& t : path.trades) {
        demand[t.step / window_steps] += side_sign(t.aggressor_side) * static_cast<double>(t.quantity);
    }
    std::vector<ImpactSample> out;
    out.reserve(demand.size());
    for (const auto& [w, q] : demand) {
        Step first = w * window_steps;
        Step last = std::min(path.steps, first + window_steps) - 1;
        double before = first > 0 ? path.mids[static_cast<std::size_t>(first - 1)] : path.opening_mid;
        out.push_back({q, path.mids[static_cast<std::size_t>(last)] - before});
    }
    return out;
}

ImpactFit fit_impact(std::span<const HistoricalMarketOrder> market_orders, std::span<const L2Row> l2,
                     std::int64_t window_ns) {
    auto samples = impact_samples(market_orders, l2, window_ns);
    return fit_impact_samples(samples);
}

}  // namespace lobsim
