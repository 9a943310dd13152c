#include "lobsim/app/commands.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lobsim/calib/bundle.hpp"
#include "lobsim/calib/rates.hpp"
#include "lobsim/data/csv.hpp"
#include "lobsim/data/tick_data.hpp"
#include "lobsim/lob/event_log.hpp"
#include "lobsim/risk/frontier.hpp"
#include "lobsim/risk/surface.hpp"

namespace fs = std::filesystem;

namespace lobsim {

namespace {

std::ofstream open_csv(const RunContext& ctx, const std::string& name, CommandResult& r) {
    auto out = open_output((ctx.out / name).string());
    out << "# " << ctx.header() << '\n';
    r.outputs.push_back(name);
    return out;
}

void finish(std::ofstream& out, const std::string& name) {
    out.flush();
    if (!out) throw IoError(fmt::format("failed writing {}", name));
}

fs::path day_dir(const fs::path& root, std::size_t d) { return root / fmt::format("day{}", d); }

// Lengthens the simulation so it covers `needed` steps.
void cover(SimConfig& sim, Step needed) {
    if (sim.total_steps() >= needed) return;
    const Step spd = sim.calendar.steps_per_day();
    sim.days = static_cast<int>((needed + spd - 1) / spd);
    if (sim.max_steps > 0) sim.max_steps = needed;
}

std::vector<ExecutionSchedule> schedules_of(const RunConfig& cfg, const MarketModel& model) {
    std::vector<ExecutionSchedule> out;
    for (const auto& s : cfg.strategies) out.push_back(build_strategy(s, cfg, model.rates));
    return out;
}

void write_costs(std::ofstream& out, const std::vector<StrategyRuns>& runs) {
    out << "strategy_id,run_id,reference,zeta,zeta_mr,zeta_mi,zeta_bps,mr_bps,mi_bps,executed_fraction,valid\n";
    for (const auto& s : runs) {
        for (std::size_t i = 0; i < s.costs.size(); ++i) {
            const auto& c = s.costs[i];
            out << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", s.id, i,
                               c.reference, c.zeta, c.zeta_mr, c.zeta_mi, c.zeta_bps, c.mr_bps, c.mi_bps,
                               c.executed_fraction, c.valid ? 1 : 0);
        }
    }
}

struct DayExtraction {
    std::vector<L2Row> l2;
    std::vector<HistoricalLimitOrder> limits;
    std::vector<HistoricalMarketOrder> markets;
};

std::vector<DayExtraction> read_extraction(const fs::path& dir) {
    std::vector<DayExtraction> days;
    for (std::size_t d = 0;; ++d) {
        const fs::path p = day_dir(dir, d);
        if (!fs::exists(p)) break;
        DayExtraction e;
        e.l2 = read_l2_csv((p / "l2.csv").string());
        e.limits = read_limit_orders_csv((p / "limit_orders.csv").string());
        e.markets = read_market_orders_csv((p / "market_orders.csv").string());
        days.push_back(std::move(e));
    }
    if (days.empty()) throw IoError(fmt::format("no extracted days under {} (expected {})", dir.string(),
                                                day_dir(dir, 0).string()));
    return days;
}

}  // namespace

const char* lobsim_version() noexcept { return LOBSIM_VERSION; }

std::string RunContext::header() const { return fmt::format("seed={} config_hash={}", config.seed, config_hash); }

MarketModel resolve_market(const RunConfig& config, SimConfig& sim) {
    sim = config.sim;
    sim.calendar = config.calendar();
    MarketModel model;
    if (!config.bundle.empty()) {
        auto b = read_bundle(config.bundle);
        if (b.step_ms != config.step_ms) {
            throw ConfigError(fmt::format("bundle step {} ms differs from configured {} ms", b.step_ms, config.step_ms));
        }
        sim.calendar = b.calendar();
        sim.chiarella = b.chiarella;
        model = b.market_model();
    } else {
        model = synthetic_market(config.synthetic);
    }
    apply_chiarella_overrides(sim.chiarella, config.chiarella_overrides);
    return model;
}

CommandResult cmd_synth(const RunContext& ctx) {
    CommandResult r;
    SimConfig sim;
    const MarketModel model = resolve_market(ctx.config, sim);
    const int days = sim.days;
    sim.days = 1;
    sim.record.events = true;
    for (int d = 0; d < days; ++d) {
        const auto path = run_simulation(sim, model, SeedSet::for_run(ctx.config.seed, static_cast<std::uint64_t>(d)));
        const TickDay day = tick_day_from_events(path.events, sim.calendar);
        const std::string ticks = fmt::format("ticks_{}.csv", d);
        const std::string trades = fmt::format("trades_{}.csv", d);
        write_tick_file((ctx.out / ticks).string(), day.ops);
        write_trade_file((ctx.out / trades).string(), day.trades);
        r.outputs.push_back(ticks);
        r.outputs.push_back(trades);
    }
    return r;
}

CommandResult cmd_ingest(const RunContext& ctx) {
    const RunConfig& cfg = ctx.config;
    if (cfg.data.days.empty()) throw ConfigError("data.days lists no tick files to ingest");
    CommandResult r;
    const SessionCalendar cal = cfg.calendar();
    std::vector<HistoricalLimitOrder> all_limits;
    std::vector<HistoricalMarketOrder> all_markets;
    auto report = open_csv(ctx, "ingest_report.csv", r);
    report << "day,tick_rows,tick_skipped,trade_rows,trade_skipped,inconsistent_ids,limit_orders,market_orders,"
              "traded_volume\n";
    for (std::size_t d = 0; d < cfg.data.days.size(); ++d) {
        auto ticks = parse_tick_file(cfg.data.days[d].ticks);
        auto trades = parse_trade_file(cfg.data.days[d].trades);
        for (const auto& m : ticks.report.messages) r.warnings.push_back(fmt::format("day {}: {}", d, m));
        for (const auto& m : trades.report.messages) r.warnings.push_back(fmt::format("day {}: {}", d, m));
        auto rebuilt = rebuild_book(ticks.rows, trades.rows, cfg.step_ms);
        const fs::path dir = day_dir(ctx.out, d);
        fs::create_directories(dir);
        write_l2_csv((dir / "l2.csv").string(), rebuilt.l2);
        write_limit_orders_csv((dir / "limit_orders.csv").string(), rebuilt.limit_orders);
        write_market_orders_csv((dir / "market_orders.csv").string(), rebuilt.market_orders);
        for (const char* f : {"l2.csv", "limit_orders.csv", "market_orders.csv"}) {
            r.outputs.push_back(fmt::format("day{}/{}", d, f));
        }
        report << fmt::format("{},{},{},{},{},{},{},{},{}\n", d, ticks.report.rows_read, ticks.report.rows_skipped,
                              trades.report.rows_read, trades.report.rows_skipped, rebuilt.inconsistent_ids.size(),
                              rebuilt.limit_orders.size(), rebuilt.market_orders.size(), rebuilt.traded_volume);
        all_limits.insert(all_limits.end(), rebuilt.limit_orders.begin(), rebuilt.limit_orders.end());
        all_markets.insert(all_markets.end(), rebuilt.market_orders.begin(), rebuilt.market_orders.end());
    }
    finish(report, "ingest_report.csv");
    auto dist = build_distributions(all_limits, all_markets, cal.open_minute(),
                                    cfg.calibration.placement_window_minutes);
    auto occ = open_csv(ctx, "occupancy.csv", r);
    occ << "spread_bucket,time_bucket,limit_orders,market_orders\n";
    for (const auto& b : dist.occupancy()) {
        occ << fmt::format("{},{},{},{}\n", b.spread_bucket, b.time_bucket, b.limit_orders, b.market_orders);
    }
    finish(occ, "occupancy.csv");
    return r;
}

CommandResult cmd_calibrate(const RunContext& ctx) {
    const RunConfig& cfg = ctx.config;
    CommandResult r;
    fs::path extraction = cfg.data.extraction_dir;
    if (extraction.empty()) {
        RunContext sub = ctx;
        sub.out = ctx.out / "extraction";
        fs::create_directories(sub.out);
        auto ing = cmd_ingest(sub);
        for (const auto& o : ing.outputs) r.outputs.push_back("extraction/" + o);
        r.warnings.insert(r.warnings.end(), ing.warnings.begin(), ing.warnings.end());
        extraction = sub.out;
    }
    const auto days = read_extraction(extraction);
    const SessionCalendar cal = cfg.calendar();

    CalibrationBundle b;
    b.windows = cfg.windows;
    b.step_ms = cfg.step_ms;
    b.calibration_seed = cfg.seed;
    std::vector<HistoricalLimitOrder> limits;
    std::vector<HistoricalMarketOrder> markets;
    std::vector<ImpactSample> samples;
    const auto window_ns = static_cast<std::int64_t>(cfg.calibration.impact_window_s * 1e9);
    for (const auto& d : days) {
        limits.insert(limits.end(), d.limits.begin(), d.limits.end());
        markets.insert(markets.end(), d.markets.begin(), d.markets.end());
        auto s = impact_samples(d.markets, d.l2, window_ns);
        samples.insert(samples.end(), s.begin(), s.end());
    }
    b.rates = estimate_rates(limits, markets, cal, static_cast<int>(days.size()));
    b.placement = build_distributions(limits, markets, cal.open_minute(), cfg.calibration.placement_window_minutes);
    b.impact = fit_impact_samples(samples);

    const auto& d0 = days.front();
    const StepSeries series = resample_to_steps(d0.l2, cal);
    const auto demand = excess_demand_per_step(d0.markets, cal);
    b.proxy = extract_fundamental_proxy(series.mids, demand, b.impact.model);
    b.initial_fundamental = b.proxy.v_hat.empty() ? 0.0 : b.proxy.v_hat.front();
    const L2Snapshot& open = opening_snapshot(d0.l2);
    b.opening_bids.assign(open.bids.begin(), open.bids.begin() + open.bid_levels);
    b.opening_asks.assign(open.asks.begin(), open.asks.begin() + open.ask_levels);

    const StylizedFacts target = historical_facts(series, d0.limits, d0.markets, cal);
    CalibrationSetup setup;
    setup.sim = cfg.sim;
    setup.sim.calendar = cal;
    setup.sim.days = 1;
    setup.sim.max_steps = 0;
    setup.model = b.market_model();
    setup.runs_per_point = cfg.calibration.runs_per_point;
    setup.seed = cfg.seed;
    setup.threads = cfg.threads;
    ChiarellaParams start = cfg.sim.chiarella;
    apply_chiarella_overrides(start, cfg.chiarella_overrides);
    const auto bounds = ChiarellaBounds::around(start, cfg.calibration.bounds_low, cfg.calibration.bounds_high);
    const std::size_t design = cfg.calibration.design_size ? cfg.calibration.design_size : 10 * kChiarellaDims;
    if (cfg.calibration.surrogate_iterations == 0) {
        r.warnings.push_back("surrogate_iterations is 0: the bundle carries the best design point");
    }
    auto res = calibrate_chiarella(target, setup, bounds, design + cfg.calibration.surrogate_iterations, design);
    b.chiarella = res.params;
    b.distance = res.distance;
    b.evaluation_log = res.log;

    const fs::path dir = ctx.out / "bundle";
    write_bundle(dir.string(), b, ctx.header());
    r.outputs.push_back("bundle/");
    return r;
}

CommandResult cmd_simulate(const RunContext& ctx) {
    CommandResult r;
    SimConfig sim;
    const MarketModel model = resolve_market(ctx.config, sim);
    sim.record.spreads = true;
    sim.record.trades = true;
    sim.record.fundamental = true;
    for (std::size_t run = 0; run < ctx.config.simulate_runs; ++run) {
        const auto p = run_simulation(sim, model, SeedSet::for_run(ctx.config.seed, run));
        const std::string pname = fmt::format("path_{}.csv", run);
        auto out = open_csv(ctx, pname, r);
        out << "step,mid,spread,fundamental,reflexive\n";
        for (std::size_t t = 0; t < p.mids.size(); ++t) {
            out << fmt::format("{},{:.1f},{},{:.6f},{:.6f}\n", t, p.mids[t], p.spreads[t], p.fundamental[t],
                               p.reflexive[t]);
        }
        finish(out, pname);
        const std::string tname = fmt::format("trades_{}.csv", run);
        auto tr = open_csv(ctx, tname, r);
        tr << "step,price,qty,aggressor_side,maker_agent,taker_agent\n";
        for (const auto& t : p.trades) {
            tr << fmt::format("{},{},{},{},{},{}\n", t.step, t.price, t.quantity, to_string(t.aggressor_side),
                              t.maker_agent_id, t.taker_agent_id);
        }
        finish(tr, tname);
        if (sim.record.events) {
            const std::string ename = fmt::format("events_{}.csv", run);
            write_event_log((ctx.out / ename).string(), p.events);
            r.outputs.push_back(ename);
        }
    }
    return r;
}

CommandResult cmd_impact(const RunContext& ctx) {
    const RunConfig& cfg = ctx.config;
    if (cfg.strategies.empty()) throw ConfigError("impact needs at least one strategy");
    CommandResult r;
    SimConfig sim;
    const MarketModel model = resolve_market(cfg, sim);
    const auto schedules = schedules_of(cfg, model);
    Step end = 0;
    for (const auto& s : schedules) end = std::max(end, s.end_step());
    cover(sim, end + cfg.to_steps(cfg.impact.tail_s));
    MonteCarloSpec mc;
    mc.n_runs = cfg.impact.n_runs;
    mc.seed = cfg.seed;
    mc.threads = cfg.threads;
    mc.curve_from = 0;
    mc.curve_to = sim.total_steps();

    std::vector<std::ofstream> fills;
    for (const auto& s : schedules) {
        fills.push_back(open_csv(ctx, fmt::format("fills_{}.csv", s.strategy_id), r));
        fills.back() << "run_id,step,price,qty\n";
    }
    auto runs = run_strategies(sim, model, schedules, mc, [&](std::size_t run, std::size_t j, const ExecutionRecord& e) {
        for (const auto& f : e.fills) fills[j] << fmt::format("{},{},{},{}\n", run, f.step, f.price, f.quantity);
    });
    for (std::size_t j = 0; j < fills.size(); ++j) finish(fills[j], schedules[j].strategy_id);

    auto out = open_csv(ctx, "impact.csv", r);
    out << "strategy_id,step,mid_baseline,mid_counterfactual,impact_ticks\n";
    for (const auto& s : runs) {
        for (std::size_t t = 0; t < s.mean_baseline.size(); ++t) {
            out << fmt::format("{},{},{:.6f},{:.6f},{:.6f}\n", s.id, t, s.mean_baseline[t], s.mean_counterfactual[t],
                               s.mean_counterfactual[t] - s.mean_baseline[t]);
        }
    }
    finish(out, "impact.csv");
    auto costs = open_csv(ctx, "costs.csv", r);
    write_costs(costs, runs);
    finish(costs, "costs.csv");
    return r;
}

CommandResult cmd_surface(const RunContext& ctx) {
    const RunConfig& cfg = ctx.config;
    CommandResult r;
    SimConfig sim;
    const MarketModel model = resolve_market(cfg, sim);
    SurfaceSpec spec;
    for (double h : cfg.surface.horizons_s) spec.horizons.push_back(cfg.to_steps(h));
    spec.sizes = cfg.surface.sizes;
    spec.interval_steps = std::max<Step>(1, cfg.to_steps(cfg.surface.interval_s));
    spec.side = cfg.surface.side;
    spec.start_step = cfg.to_steps(cfg.surface.start_s);
    spec.n_runs = cfg.surface.n_runs;
    spec.seed = cfg.seed;
    spec.threads = cfg.threads;
    spec.full_execution_pct = cfg.surface.full_execution_pct;
    spec.bloomberg = cfg.surface.bloomberg;
    const auto surface = build_surface(sim, model, spec);
    for (const auto& c : surface.cells) {
        if (c.extrapolated) {
            r.warnings.push_back(fmt::format("cell horizon={} size={} executed {:.2f}%: extrapolated", c.horizon,
                                             c.size, c.pct_executed));
        }
    }
    write_surface_csv(ctx.out / "surface.csv", surface, ctx.header());
    r.outputs.push_back("surface.csv");
    return r;
}

CommandResult cmd_frontier(const RunContext& ctx) {
    const RunConfig& cfg = ctx.config;
    if (cfg.strategies.size() < 2) throw ConfigError("frontier needs at least two strategies");
    CommandResult r;
    SimConfig sim;
    const MarketModel model = resolve_market(cfg, sim);
    const auto schedules = schedules_of(cfg, model);
    Step end = 0;
    for (const auto& s : schedules) end = std::max(end, s.end_step());
    cover(sim, end);
    MonteCarloSpec mc;
    mc.n_runs = cfg.frontier.n_runs;
    mc.seed = cfg.seed;
    mc.threads = cfg.threads;
    auto runs = run_strategies(sim, model, schedules, mc);
    std::vector<FrontierPoint> points;
    for (const auto& s : runs) points.push_back(summarize_strategy(s.id, s.costs));
    const auto frontier = efficient_frontier(points, cfg.frontier.lambdas);
    write_frontier_csv(ctx.out / "frontier.csv", frontier, ctx.header());
    write_frontier_optimal_csv(ctx.out / "frontier_optimal.csv", frontier, ctx.header());
    r.outputs.push_back("frontier.csv");
    r.outputs.push_back("frontier_optimal.csv");
    auto costs = open_csv(ctx, "costs.csv", r);
    write_costs(costs, runs);
    finish(costs, "costs.csv");
    return r;
}

void write_manifest(const RunContext& ctx, const std::string& command, const CommandResult& result,
                    double wall_seconds) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = lobsim_version();
    j["seed"] = ctx.config.seed;
    j["threads"] = ctx.config.threads;
    j["config_hash"] = ctx.config_hash;
    j["bundle"] = ctx.config.bundle;
    j["wall_time_s"] = wall_seconds;
    j["outputs"] = result.outputs;
    j["warnings"] = result.warnings;
    std::ofstream out(ctx.out / "manifest.json", std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", (ctx.out / "manifest.json").string()));
    out << j.dump(2) << '\n';
}

}  // namespace lobsim
