#include "lobsim/risk/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "lobsim/core/types.hpp"

namespace lobsim {

namespace {

std::vector<CostRecord> valid_only(std::span<const CostRecord> runs) {
    std::vector<CostRecord> v;
    for (const auto& r : runs) {
        if (r.valid) v.push_back(r);
    }
    return v;
}

// Leave-one-out jackknife standard error of stat.
double jackknife_se(std::span<const CostRecord> runs, const RunStatistic& stat) {
    const std::size_t n = runs.size();
    if (n < 3) return 0.0;
    std::vector<double> loo(n);
    std::vector<CostRecord> sub(runs.begin() + 1, runs.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) sub[i - 1] = runs[i - 1];
        loo[i] = stat(sub);
    }
    double m = 0.0;
    for (double x : loo) m += x;
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : loo) ss += (x - m) * (x - m);
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

bool better(const FrontierPoint& a, const FrontierPoint& b, double lambda) {
    const double ua = a.utility(lambda), ub = b.utility(lambda);
    if (ua != ub) return ua < ub;
    return a.var_cost_bps2 < b.var_cost_bps2;
}

std::size_t argmin(const std::vector<FrontierPoint>& pts, double lambda) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (better(pts[i], pts[best], lambda)) best = i;
    }
    return best;
}

}  // namespace

double frontier_mean(std::span<const CostRecord> runs) {
    double s = 0.0;
    for (const auto& r : runs) s += r.mi_bps;
    return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

double frontier_variance(std::span<const CostRecord> runs) {
    if (runs.size() < 2) return 0.0;
    double m = 0.0;
    for (const auto& r : runs) m += r.zeta_bps;
    m /= static_cast<double>(runs.size());
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.zeta_bps - m) * (r.zeta_bps - m);
    return ss / static_cast<double>(runs.size() - 1);
}

FrontierPoint summarize_strategy(const std::string& id, std::span<const CostRecord> runs) {
    auto v = valid_only(runs);
    FrontierPoint p;
    p.strategy_id = id;
    p.n_runs = v.size();
    p.mean_cost_bps = frontier_mean(v);
    p.var_cost_bps2 = frontier_variance(v);
    p.se_mean = jackknife_se(v, frontier_mean);
    p.se_var = jackknife_se(v, frontier_variance);
    return p;
}

PairedDifference paired_difference(std::span<const CostRecord> a, std::span<const CostRecord> b,
                                   const RunStatistic& stat) {
    if (a.size() != b.size()) throw DomainError("paired difference needs equally many runs");
    std::vector<CostRecord> va, vb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].valid && b[i].valid) {
            va.push_back(a[i]);
            vb.push_back(b[i]);
        }
    }
    PairedDifference d;
    d.pairs = va.size();
    if (va.empty()) return d;
    d.difference = stat(va) - stat(vb);
    const std::size_t n = va.size();
    if (n < 3) return d;
    std::vector<double> loo(n);
    std::vector<CostRecord> sa, sb;
    for (std::size_t i = 0; i < n; ++i) {
        sa.clear();
        sb.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sa.push_back(va[j]);
            sb.push_back(vb[j]);
        }
        loo[i] = stat(sa) - stat(sb);
    }
    double m = 0.0;
    for (double x : loo) m += x;
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : loo) ss += (x - m) * (x - m);
    d.se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    return d;
}

FrontierResult efficient_frontier(std::vector<FrontierPoint> points, std::span<const double> lambdas) {
    if (points.empty()) throw DomainError("frontier needs at least one strategy");
    FrontierResult r;
    r.lambdas.assign(lambdas.begin(), lambdas.end());
    for (double l : lambdas) {
        if (l < 0.0) throw DomainError("risk aversion must be non-negative");
        r.optimal.push_back(argmin(points, l));
    }
    // A point is on the envelope iff it minimizes utility for some lambda >= 0.
    // Candidate lambdas: 0, every pairwise breakpoint, midpoints between them,
    // and one beyond the largest.
    std::vector<double> cand{0.0};
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double dv = points[i].var_cost_bps2 - points[j].var_cost_bps2;
            if (dv == 0.0) continue;
            double l = -(points[i].mean_cost_bps - points[j].mean_cost_bps) / dv;
            if (l > 0.0) cand.push_back(l);
        }
    }
    std::sort(cand.begin(), cand.end());
    std::vector<double> probes;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        probes.push_back(cand[i]);
        if (i + 1 < cand.size()) probes.push_back(0.5 * (cand[i] + cand[i + 1]));
    }
    probes.push_back(cand.back() * 2.0 + 1.0);
    std::vector<bool> on(points.size(), false);
    for (double l : probes) on[argmin(points, l)] = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (on[i]) r.envelope.push_back(i);
    }
    std::sort(r.envelope.begin(), r.envelope.end(), [&](std::size_t a, std::size_t b) {
        return points[a].var_cost_bps2 < points[b].var_cost_bps2;
    });
    r.points = std::move(points);
    return r;
}

void write_frontier_csv(const std::filesystem::path& path, const FrontierResult& frontier,
                        const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "strategy_id,mean_cost_bps,var_cost_bps2\n";
    for (const auto& p : frontier.points) {
        out << fmt::format("{},{:.6f},{:.6f}\n", p.strategy_id, p.mean_cost_bps, p.var_cost_bps2);
    }
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

void write_frontier_optimal_csv(const std::filesystem::path& path, const FrontierResult& frontier,
                                const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "lambda_risk,strategy_id,utility\n";
    for (std::size_t i = 0; i < frontier.lambdas.size(); ++i) {
        const auto& p = frontier.points[frontier.optimal[i]];
        out << fmt::format("{:.8g},{},{:.6f}\n", frontier.lambdas[i], p.strategy_id, p.utility(frontier.lambdas[i]));
    }
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

}  // namespace lobsim
