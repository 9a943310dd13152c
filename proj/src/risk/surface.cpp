#include "lobsim/risk/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "lobsim/core/spline.hpp"

namespace lobsim {

namespace {

void extrapolate_horizon(LiquidityRiskSurface& s, std::size_t h, double full_pct) {
    std::vector<double> x, mean, sd;
    bool any_partial = false;
    for (std::size_t j = 0; j < s.sizes.size(); ++j) {
        SurfaceCell& c = s.cells[h * s.sizes.size() + j];
        if (c.pct_executed >= full_pct && c.valid_runs > 0) {
            x.push_back(static_cast<double>(c.size));
            mean.push_back(c.mean_cost_mi_bps);
            sd.push_back(c.std_cost_bps);
        } else {
            any_partial = true;
        }
    }
    if (!any_partial) return;
    const bool can_fit = x.size() >= 2;
    std::optional<NaturalCubicSpline> fm, fs;
    if (can_fit) {
        fm.emplace(x, mean);
        fs.emplace(x, sd);
    }
    for (std::size_t j = 0; j < s.sizes.size(); ++j) {
        SurfaceCell& c = s.cells[h * s.sizes.size() + j];
        if (c.pct_executed >= full_pct && c.valid_runs > 0) continue;
        c.extrapolated = true;
        if (can_fit) {
            c.mean_cost_mi_bps = (*fm)(static_cast<double>(c.size));
            c.std_cost_bps = std::max(0.0, (*fs)(static_cast<double>(c.size)));
        }
    }
}

}  // namespace

LiquidityRiskSurface build_surface(const SimConfig& config, const MarketModel& model, const SurfaceSpec& spec) {
    if (spec.horizons.empty() || spec.sizes.empty()) throw DomainError("surface grid is empty");
    if (spec.n_runs < 2) throw DomainError("surface needs at least two runs per cell");
    std::vector<Qty> sizes = spec.sizes;
    std::vector<Step> horizons = spec.horizons;
    std::sort(sizes.begin(), sizes.end());
    std::sort(horizons.begin(), horizons.end());
    if (std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end() ||
        std::adjacent_find(horizons.begin(), horizons.end()) != horizons.end()) {
        throw DomainError("surface grid values must be distinct");
    }
    if (sizes.front() <= 0 || horizons.front() <= 0) throw DomainError("surface sizes and horizons must be positive");

    SimConfig cfg = config;
    const Step needed = spec.start_step + horizons.back() + 1;
    if (cfg.total_steps() < needed) {
        const Step per_day = cfg.calendar.steps_per_day();
        cfg.days = static_cast<int>((needed + per_day - 1) / per_day);
        cfg.max_steps = needed;
    }

    std::vector<ExecutionSchedule> schedules;
    for (Step h : horizons) {
        for (Qty q : sizes) {
            MetaOrder m{spec.side, q, spec.start_step, h, fmt::format("h{}_q{}", h, q)};
            schedules.push_back(build_uniform_schedule(m, spec.interval_steps));
        }
    }
    MonteCarloSpec mc;
    mc.n_runs = spec.n_runs;
    mc.seed = spec.seed;
    mc.threads = spec.threads;
    auto runs = run_strategies(cfg, model, schedules, mc);

    LiquidityRiskSurface s;
    s.horizons = horizons;
    s.sizes = sizes;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        SurfaceCell c;
        c.horizon = schedules[i].horizon;
        c.size = schedules[i].total;
        c.n_runs = runs[i].costs.size();
        std::vector<double> mi, total;
        double frac = 0.0, ref = 0.0;
        for (const auto& r : runs[i].costs) {
            frac += r.executed_fraction;
            ref += r.reference;
            if (!r.valid) continue;
            mi.push_back(r.mi_bps);
            total.push_back(r.zeta_bps);
        }
        c.valid_runs = mi.size();
        c.pct_executed = 100.0 * frac / static_cast<double>(c.n_runs);
        c.reference = ref / static_cast<double>(c.n_runs);
        auto m = mean_se(mi);
        c.mean_cost_mi_bps = c.valid_runs ? m.mean : std::numeric_limits<double>::quiet_NaN();
        c.se_cost_mi_bps = m.se;
        auto t = mean_se(total);
        c.std_cost_bps = t.se * std::sqrt(static_cast<double>(t.n));
        if (spec.bloomberg && c.reference != 0.0) {
            c.bloomberg_tc_bps = 1e4 * bloomberg_tc(static_cast<double>(c.size), *spec.bloomberg) / c.reference;
        }
        c.costs = std::move(runs[i].costs);
        s.cells.push_back(std::move(c));
    }
    for (std::size_t h = 0; h < horizons.size(); ++h) extrapolate_horizon(s, h, spec.full_execution_pct);
    return s;
}

void write_surface_csv(const std::filesystem::path& path, const LiquidityRiskSurface& surface,
                       const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    const bool bb = std::any_of(surface.cells.begin(), surface.cells.end(),
                                [](const SurfaceCell& c) { return c.bloomberg_tc_bps.has_value(); });
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "horizon_steps,size,mean_cost_mi_bps,std_cost_bps,pct_executed,n_runs,extrapolated";
    if (bb) out << ",bloomberg_tc_bps";
    out << '\n';
    for (const auto& c : surface.cells) {
        out << fmt::format("{},{},{:.6f},{:.6f},{:.4f},{},{}", c.horizon, c.size, c.mean_cost_mi_bps, c.std_cost_bps,
                           c.pct_executed, c.n_runs, c.extrapolated ? 1 : 0);
        if (bb) out << (c.bloomberg_tc_bps ? fmt::format(",{:.6f}", *c.bloomberg_tc_bps) : std::string(","));
        out << '\n';
    }
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

}  // namespace lobsim
