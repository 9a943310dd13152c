#include "lobsim/calib/chiarella_calibration.hpp"

#include <algorithm>

#include "lobsim/core/parallel.hpp"

namespace lobsim {

std::array<double, kChiarellaDims> chiarella_vector(const ChiarellaParams& p) noexcept {
    return {p.kappa, p.beta_l, p.gamma_l, p.beta_h, p.gamma_h, p.sigma};
}

ChiarellaParams chiarella_from_vector(std::span<const double> x, const ChiarellaParams& base) {
    if (x.size() != kChiarellaDims) throw DomainError("Chiarella vector needs six coordinates");
    ChiarellaParams p = base;
    p.kappa = x[0];
    p.beta_l = x[1];
    p.gamma_l = x[2];
    p.beta_h = x[3];
    p.gamma_h = x[4];
    p.sigma = x[5];
    return p;
}

ChiarellaBounds ChiarellaBounds::around(const ChiarellaParams& p, double lo, double hi) {
    auto v = chiarella_vector(p);
    std::array<double, kChiarellaDims> a{}, b{};
    for (std::size_t i = 0; i < kChiarellaDims; ++i) {
        a[i] = v[i] * lo;
        b[i] = v[i] * hi;
    }
    return {chiarella_from_vector(a, p), chiarella_from_vector(b, p)};
}

Bounds ChiarellaBounds::as_bounds() const {
    auto a = chiarella_vector(lower);
    auto b = chiarella_vector(upper);
    return {{a.begin(), a.end()}, {b.begin(), b.end()}};
}

StylizedFacts path_facts(const PathRecord& path, const FactsGrid& grid) {
    const auto skip = static_cast<std::size_t>(path.warmup);
    std::span<const double> mids(path.mids);
    std::span<const Price> spreads(path.spreads);
    std::vector<double> limits(path.limit_per_minute.begin(), path.limit_per_minute.end());
    std::vector<double> markets(path.market_per_minute.begin(), path.market_per_minute.end());
    FactsInput in{mids.subspan(std::min(skip, mids.size())),
                  spreads.empty() ? spreads : spreads.subspan(std::min(skip, spreads.size())),
                  limits,
                  markets,
                  path.order_signs};
    return compute_stylized_facts(in, grid);
}

StylizedFacts historical_facts(const StepSeries& series, std::span<const HistoricalLimitOrder> limit_orders,
                               std::span<const HistoricalMarketOrder> market_orders, const SessionCalendar& calendar,
                               const FactsGrid& grid) {
    const auto minutes = static_cast<std::size_t>(calendar.trading_minutes());
    std::vector<double> limits(minutes, 0.0), markets(minutes, 0.0);
    auto minute_of = [&](std::int64_t ns) -> std::optional<std::size_t> {
        auto s = calendar.step_at(ns);
        if (!s) return std::nullopt;
        return static_cast<std::size_t>(calendar.trading_minute(*s));
    };
    for (const auto& o : limit_orders) {
        if (auto m = minute_of(o.submit_time_ns)) limits[*m] += 1.0;
    }
    std::vector<std::int8_t> signs;
    signs.reserve(market_orders.size());
    for (const auto& o : market_orders) {
        if (auto m = minute_of(o.time_ns)) markets[*m] += 1.0;
        signs.push_back(static_cast<std::int8_t>(side_sign(o.side)));
    }
    FactsInput in{series.mids, series.spreads, limits, markets, signs};
    return compute_stylized_facts(in, grid);
}

double simulated_distance(const ChiarellaParams& params, const StylizedFacts& target, const CalibrationSetup& setup) {
    if (setup.runs_per_point < 1) throw ConfigError("calibration needs at least one run per point");
    SimConfig cfg = setup.sim;
    cfg.mode = ModelMode::Chiarella;
    cfg.chiarella = params;
    cfg.record.spreads = true;
    double total = 0.0;
    for (int r = 0; r < setup.runs_per_point; ++r) {
        auto path = run_simulation(cfg, setup.model, SeedSet::for_run(setup.seed, static_cast<std::uint64_t>(r)));
        total += facts_distance(path_facts(path, setup.grid), target, setup.weights);
    }
    return total / setup.runs_per_point;
}

CalibrationResult calibrate_chiarella(const StylizedFacts& target, const CalibrationSetup& setup,
                                      const ChiarellaBounds& bounds, std::size_t budget, std::size_t design_size) {
    SurrogateOptions opt;
    opt.budget = budget;
    opt.design_size = design_size;
    opt.seed = setup.seed;
    opt.threads = setup.threads;
    const ChiarellaParams base = bounds.lower;
    auto objective = [&](std::span<const double> x) {
        return simulated_distance(chiarella_from_vector(x, base), target, setup);
    };
    auto res = surrogate_minimize(objective, bounds.as_bounds(), opt);
    CalibrationResult out;
    out.params = chiarella_from_vector(res.best_x, base);
    out.distance = res.best_value;
    out.design_size = res.design_size;
    out.seed = setup.seed;
    out.log.reserve(res.log.size());
    for (const auto& e : res.log) out.log.push_back({chiarella_from_vector(e.x, base), e.value});
    return out;
}

}  // namespace lobsim
