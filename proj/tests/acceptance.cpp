// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// when any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "lobsim/agents/behaviours.hpp"
#include "lobsim/calib/chiarella_calibration.hpp"
#include "lobsim/calib/impact_fit.hpp"
#include "lobsim/calib/rates.hpp"
#include "lobsim/calib/surrogate.hpp"
#include "lobsim/data/book_rebuild.hpp"
#include "lobsim/data/tick_data.hpp"
#include "lobsim/risk/bloomberg.hpp"
#include "lobsim/risk/frontier.hpp"
#include "lobsim/risk/montecarlo.hpp"
#include "lobsim/risk/paired.hpp"
#include "lobsim/risk/surface.hpp"
#include "lobsim/sim/synthetic.hpp"
#include "support/reference_matcher.hpp"

using namespace lobsim;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Every cost record produced by any criterion passes through here.
struct IdentityAudit {
    std::size_t records = 0;
    double worst = 0.0;

    void add(const CostRecord& c) {
        if (!c.valid) return;
        ++records;
        worst = std::max(worst, std::abs(c.zeta - (c.zeta_mr + c.zeta_mi)) / std::max(1.0, std::abs(c.zeta)));
    }
    void add(const std::vector<StrategyRuns>& runs) {
        for (const auto& r : runs)
            for (const auto& c : r.costs) add(c);
    }
};

IdentityAudit g_audit;

SimConfig session_config(const SyntheticSpec& spec) {
    SimConfig cfg;
    cfg.calendar = SessionCalendar(spec.windows, spec.step_ms);
    cfg.chiarella = synthetic_chiarella();
    return cfg;
}

SyntheticSpec minutes_spec(int minutes) {
    SyntheticSpec spec;
    spec.windows = {{555, 555 + minutes}};
    return spec;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome matching_oracle() {
    const auto t0 = Clock::now();
    std::size_t mismatches = 0, trades = 0;
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
        auto ops = testing::random_stream(seed, 1000);
        auto engine = testing::run_engine(ops);
        auto reference = testing::run_reference(ops);
        trades += engine.trades.size();
        if (engine.trades != reference.trades || !testing::same_resting(engine.resting, reference.resting)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 60.0,
            fmt::format("10000 streams, {} trades, {} mismatches, {:.1f} s", trades, mismatches, secs)};
}

Outcome pairing_determinism() {
    auto spec = minutes_spec(10);
    auto model = synthetic_market(spec);
    auto cfg = session_config(spec);
    auto zero = build_uniform_schedule({Side::Sell, 0, 3000, 15000, "zero"}, 500);
    std::size_t identical = 0;
    const std::size_t seeds = 25;
    for (std::size_t r = 0; r < seeds; ++r) {
        auto pr = run_paired(cfg, model, SeedSet::for_run(77, r), zero);
        identical += pr.baseline.mids == pr.counterfactual.mids;
    }
    return {identical == seeds, fmt::format("{}/{} seeds bit-identical", identical, seeds)};
}

// Shared by the market-risk and impact-shape criteria: a 5-minute uniform
// sell of 300 sliced every 10 s, 40-minute session, 50 pairs.
struct ImpactExperiment {
    Step start = 3000;
    Step horizon = 15000;
    std::vector<double> mean_impact;  // per step, averaged over pairs
    std::vector<double> plateaus;     // per pair, last minute of the post-execution horizon
    std::vector<CostRecord> costs;
    double seconds = 0.0;
};

const ImpactExperiment& impact_experiment() {
    static const ImpactExperiment exp = [] {
        ImpactExperiment e;
        auto spec = minutes_spec(40);
        auto model = synthetic_market(spec);
        auto cfg = session_config(spec);
        cfg.max_steps = e.start + 2 * e.horizon + 3000;
        auto schedule = build_uniform_schedule({Side::Sell, 300, e.start, e.horizon, "uniform"}, 500);
        const std::size_t pairs = 50;
        const auto tail_end = static_cast<std::size_t>(e.start + 2 * e.horizon);
        e.mean_impact.assign(static_cast<std::size_t>(cfg.max_steps), 0.0);
        const auto t0 = Clock::now();
        for (std::size_t r = 0; r < pairs; ++r) {
            auto pr = run_paired(cfg, model, SeedSet::for_run(11, r), schedule);
            for (std::size_t t = 0; t < pr.impact.size(); ++t) e.mean_impact[t] += pr.impact[t] / pairs;
            double plateau = 0.0;
            for (std::size_t t = tail_end - 3000; t < tail_end; ++t) plateau += pr.impact[t] / 3000.0;
            e.plateaus.push_back(plateau);
            e.costs.push_back(pr.cost);
            g_audit.add(pr.cost);
        }
        e.seconds = seconds_since(t0);
        return e;
    }();
    return exp;
}

Outcome market_risk() {
    const auto& e = impact_experiment();
    std::vector<double> mr;
    for (const auto& c : e.costs)
        if (c.valid) mr.push_back(c.zeta_mr);
    auto ms = mean_se(mr);
    return {std::abs(ms.mean) < 3.0 * ms.se,
            fmt::format("mean zeta_MR {:.3f} ticks, SE {:.3f}, {} pairs", ms.mean, ms.se, ms.n)};
}

Outcome impact_shape() {
    const auto& e = impact_experiment();
    const std::size_t bin = 50;  // 1 s
    std::vector<double> bins;
    for (std::size_t t = 0; t + bin <= e.mean_impact.size(); t += bin) {
        double s = 0.0;
        for (std::size_t k = t; k < t + bin; ++k) s += e.mean_impact[k];
        bins.push_back(s / static_cast<double>(bin));
    }
    const std::size_t first = static_cast<std::size_t>(e.start) / bin + 1;
    const std::size_t end = static_cast<std::size_t>(e.start + e.horizon) / bin;
    const std::size_t tail_end = static_cast<std::size_t>(e.start + 2 * e.horizon) / bin;

    std::size_t non_negative = 0;
    for (std::size_t i = first; i < end; ++i) non_negative += bins[i] >= 0.0;
    std::size_t peak = first;
    for (std::size_t i = first; i < tail_end; ++i)
        if (bins[i] < bins[peak]) peak = i;
    const auto plateau = mean_se(e.plateaus);

    const double peak_s = static_cast<double>(peak);
    const double end_s = static_cast<double>(end);
    const double horizon_s = static_cast<double>(e.horizon) / static_cast<double>(bin);
    const double ratio = plateau.mean / bins[peak];
    const bool negative = non_negative == 0;
    const bool peak_near_end = std::abs(peak_s - end_s) <= 0.1 * horizon_s;
    const bool decayed = ratio <= 0.8;
    const bool permanent = plateau.mean < -2.0 * plateau.se;
    return {negative && peak_near_end && decayed && permanent && e.seconds <= 600.0,
            fmt::format("{} non-negative 1 s bins during execution; peak {:.2f} ticks at {:.0f} s (end {:.0f} s); "
                        "plateau {:.2f} (SE {:.2f}, {:.0f}% of peak); {:.0f} s",
                        non_negative, bins[peak], peak_s, end_s, plateau.mean, plateau.se, 100.0 * ratio,
                        e.seconds)};
}

Outcome concavity() {
    auto spec = minutes_spec(60);
    auto model = synthetic_market(spec);
    auto cfg = session_config(spec);
    SurfaceSpec s;
    s.horizons = {90000};
    s.sizes = {100, 200, 400, 800, 1600};
    s.interval_steps = 500;
    s.start_step = 3000;
    s.n_runs = 50;
    s.seed = 1;
    const auto t0 = Clock::now();
    auto surf = build_surface(cfg, model, s);
    std::vector<double> q, m;
    std::string cells;
    bool positive = true;
    double min_exec = 100.0;
    for (const auto& c : surf.cells) {
        for (const auto& r : c.costs) g_audit.add(r);
        q.push_back(static_cast<double>(c.size));
        m.push_back(c.mean_cost_mi_bps);
        positive &= c.mean_cost_mi_bps > 0.0;
        min_exec = std::min(min_exec, c.pct_executed);
        cells += fmt::format(" {}:{:.2f}", c.size, c.mean_cost_mi_bps);
    }
    if (!positive) return {false, "non-positive mean cost:" + cells};
    const double slope = log_log_slope(q, m);
    return {slope >= 0.3 && slope <= 0.8,
            fmt::format("exponent {:.3f} over sizes{} bps; min executed {:.1f}%; {:.0f} s", slope, cells, min_exec,
                        seconds_since(t0))};
}

Outcome impact_fit_recovery() {
    double worst_scale = 0.0, worst_exp = 0.0;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        RandomStream rng(derive_seed(700, rep));
        std::vector<ImpactSample> samples;
        for (int i = 0; i < 435 * 60; ++i) {
            const double q = 1.0 + static_cast<double>(rng.index(200));
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            samples.push_back({sign * q, sign * 0.561 * std::sqrt(q) * (1.0 + 0.1 * rng.normal())});
        }
        auto fit = fit_impact_samples(samples);
        worst_scale = std::max(worst_scale, std::abs(fit.model.scale / 0.561 - 1.0));
        worst_exp = std::max(worst_exp, std::abs(fit.model.exponent / 0.5 - 1.0));
    }
    return {worst_scale < 0.05 && worst_exp < 0.05,
            fmt::format("worst relative error over 10 reps: scale {:.2f}%, exponent {:.2f}%", 100 * worst_scale,
                        100 * worst_exp)};
}

Outcome rate_and_placement_recovery() {
    // Rates: ZI order entry at known per-minute probabilities.
    auto spec = minutes_spec(10);
    auto model = synthetic_market(spec);
    for (int m = 0; m < 10; ++m) {
        model.rates.alpha[static_cast<std::size_t>(555 + m)] = 0.1 + 0.07 * m;
        model.rates.mu[static_cast<std::size_t>(555 + m)] = 0.02 + 0.01 * m;
    }
    auto cfg = session_config(spec);
    cfg.mode = ModelMode::ZeroIntelligence;
    cfg.zi_use_rate_profile = true;
    cfg.warmup_steps = 0;
    cfg.record.events = true;
    auto path = run_simulation(cfg, model, SeedSet::for_run(808, 0));
    std::vector<HistoricalLimitOrder> limits;
    std::vector<HistoricalMarketOrder> markets;
    for (const auto& ev : path.events) {
        const int minute = cfg.calendar.minute_of_day(ev.step);
        if (ev.type == EventType::Limit) {
            HistoricalLimitOrder o;
            o.minute_of_day = minute;
            limits.push_back(o);
        } else if (ev.type == EventType::Market) {
            HistoricalMarketOrder o;
            o.minute_of_day = minute;
            o.volume = ev.qty;
            markets.push_back(o);
        }
    }
    auto rates = estimate_rates(limits, markets, cfg.calendar);
    const double n = static_cast<double>(cfg.calendar.steps_per_minute());
    int rate_misses = 0;
    double worst_z = 0.0;
    for (int m = 555; m < 565; ++m) {
        for (auto [est, truth] : {std::pair{rates.alpha_at(m), model.rates.alpha_at(m)},
                                  std::pair{rates.mu_at(m), model.rates.mu_at(m)}}) {
            const double z = std::abs(est - truth) / std::sqrt(truth * (1 - truth) / n);
            worst_z = std::max(worst_z, z);
            rate_misses += z > 3.0;
        }
    }

    // Placement: a simulated day through tick files and book rebuild, then
    // resampling against the rebuilt buckets.
    auto day_spec = minutes_spec(30);
    auto day_model = synthetic_market(day_spec);
    auto day_cfg = session_config(day_spec);
    day_cfg.record.events = true;
    day_cfg.record.trades = true;
    auto day_path = run_simulation(day_cfg, day_model, SeedSet::for_run(809, 0));
    auto day = tick_day_from_events(day_path.events, day_cfg.calendar);
    auto rebuilt = rebuild_book(day.ops, day.trades, day_spec.step_ms);
    auto dist = build_distributions(rebuilt.limit_orders, rebuilt.market_orders, 555);

    std::vector<const HistoricalLimitOrder*> contexts;
    for (const auto& o : rebuilt.limit_orders)
        if (!o.no_reference && o.volume > 0) contexts.push_back(&o);
    std::map<std::pair<int, int>, double> source;
    for (const auto* o : contexts) {
        source[{EmpiricalOrderDistribution::spread_bucket(o->spread_at_submit), dist.time_bucket(o->minute_of_day)}] +=
            1.0 / static_cast<double>(contexts.size());
    }
    RandomStream rng(810);
    const int draws = 100000;
    std::map<std::pair<int, int>, int> drawn;
    int unmatched = 0;
    for (int i = 0; i < draws; ++i) {
        const auto* ctx = contexts[rng.index(contexts.size())];
        const auto& pool = dist.limit_pool(ctx->spread_at_submit, ctx->minute_of_day);
        const auto& tuple = pool[rng.index(pool.size())];
        bool found = false;
        for (const auto& [key, bucket] : dist.buckets()) {
            if (&bucket.limits == &pool) {
                found = std::find(bucket.limits.begin(), bucket.limits.end(), tuple) != bucket.limits.end();
                ++drawn[key];
                break;
            }
        }
        unmatched += !found;
    }
    int bucket_misses = 0;
    for (const auto& [key, p] : source) {
        const double freq = drawn[key] / static_cast<double>(draws);
        bucket_misses += std::abs(freq - p) > 3.0 * std::sqrt(p * (1 - p) / draws);
    }
    return {rate_misses == 0 && bucket_misses == 0 && unmatched == 0,
            fmt::format("rates: {} of 20 outside 3 SE (worst {:.2f} SE); placement: {} buckets, {} outside 3 SE, "
                        "{} draws not from their bucket",
                        rate_misses, worst_z, source.size(), bucket_misses, unmatched)};
}

Outcome frontier_ordering() {
    auto spec = minutes_spec(10);
    auto model = synthetic_market(spec);
    auto cfg = session_config(spec);
    cfg.days = 5;
    const std::vector<std::vector<double>> fractions{{1, 0, 0, 0, 0}, {0.2, 0.2, 0.2, 0.2, 0.2}, {0, 0, 0, 0, 1}};
    const char* ids[] = {"A", "B", "C"};
    std::vector<ExecutionSchedule> schedules;
    for (std::size_t i = 0; i < 3; ++i) {
        MetaOrder meta{Side::Sell, 1000, 0, cfg.total_steps(), ids[i]};
        schedules.push_back(build_daily_schedule(meta, fractions[i], model.rates, cfg.calendar, 500));
    }
    MonteCarloSpec mc;
    mc.n_runs = 50;
    mc.seed = 1;
    const auto t0 = Clock::now();
    auto runs = run_strategies(cfg, model, schedules, mc);
    g_audit.add(runs);
    std::vector<FrontierPoint> points;
    for (const auto& r : runs) points.push_back(summarize_strategy(r.id, r.costs));
    auto v_ab = paired_difference(runs[1].costs, runs[0].costs, frontier_variance);
    auto v_bc = paired_difference(runs[2].costs, runs[1].costs, frontier_variance);
    auto e_ab = paired_difference(runs[0].costs, runs[1].costs, frontier_mean);
    std::vector<double> lambdas{0, 0.001, 0.01, 0.1, 1, 10};
    auto f = efficient_frontier(points, lambdas);
    bool c_on_envelope = false;
    for (auto i : f.envelope) c_on_envelope |= f.points[i].strategy_id == "C";
    for (auto i : f.optimal) c_on_envelope |= f.points[i].strategy_id == "C";
    const bool pass = v_ab.difference > 2 * v_ab.se && v_bc.difference > 2 * v_bc.se &&
                      e_ab.difference > 2 * e_ab.se && !c_on_envelope;
    return {pass, fmt::format("V(B)-V(A) {:.1f} (SE {:.1f}); V(C)-V(B) {:.1f} (SE {:.1f}); E(A)-E(B) {:.2f} (SE {:.2f}) "
                              "bps; C on envelope: {}; {:.0f} s",
                              v_ab.difference, v_ab.se, v_bc.difference, v_bc.se, e_ab.difference, e_ab.se,
                              c_on_envelope ? "yes" : "no", seconds_since(t0))};
}

Outcome surrogate_optimizer() {
    Bounds box{{-5.0, -5.0}, {5.0, 5.0}};
    std::size_t calls = 0;
    Objective quad = [&](std::span<const double> x) {
        ++calls;
        return 3.0 + (x[0] - 1.3) * (x[0] - 1.3) + 2.0 * (x[1] + 2.1) * (x[1] + 2.1) + 0.5 * (x[0] - 1.3) * (x[1] + 2.1);
    };
    SurrogateOptions opt;
    opt.budget = 50;
    opt.seed = 5;
    auto r = surrogate_minimize(quad, box, opt);
    const double err = std::max(std::abs(r.best_x[0] / 1.3 - 1.0), std::abs(r.best_x[1] / -2.1 - 1.0));
    const bool quad_ok = err < 0.05 && calls <= 50;

    auto spec = minutes_spec(60);
    CalibrationSetup setup;
    setup.model = synthetic_market(spec);
    setup.sim = session_config(spec);
    setup.runs_per_point = 5;
    setup.seed = 31;
    const ChiarellaParams truth = setup.sim.chiarella;
    auto target_cfg = setup.sim;
    target_cfg.record.spreads = true;
    auto target = path_facts(run_simulation(target_cfg, setup.model, SeedSet::for_run(9001, 0)));
    const auto t0 = Clock::now();
    auto cal = calibrate_chiarella(target, setup, ChiarellaBounds::around(truth), 200);
    int beaten = 0;
    double closest = 1e300;
    const auto base = chiarella_vector(truth);
    for (std::size_t d = 0; d < kChiarellaDims; ++d) {
        for (double f : {0.9, 1.1}) {
            auto v = base;
            v[d] *= f;
            const double dist = simulated_distance(chiarella_from_vector(v, truth), target, setup);
            closest = std::min(closest, dist);
            beaten += dist < cal.distance;
        }
    }
    return {quad_ok && beaten == 0,
            fmt::format("quadratic: {} evaluations, worst coordinate error {:.2f}%; self-calibration: achieved {:.4f}, "
                        "best perturbed {:.4f}, {} of 12 perturbations closer; {:.0f} s",
                        calls, 100 * err, cal.distance, closest, beaten, seconds_since(t0))};
}

Outcome performance() {
    SyntheticSpec spec;  // 09:15-16:30
    auto model = synthetic_market(spec);
    auto cfg = session_config(spec);
    const auto t0 = Clock::now();
    auto path = run_simulation(cfg, model, SeedSet::for_run(1, 0));
    const double session_s = seconds_since(t0);

    auto small = minutes_spec(10);
    auto small_model = synthetic_market(small);
    auto small_cfg = session_config(small);
    std::vector<ExecutionSchedule> s{build_uniform_schedule({Side::Sell, 300, 3000, 15000, "u"}, 500)};
    MonteCarloSpec mc;
    mc.n_runs = 16;
    mc.threads = 1;
    auto t1 = Clock::now();
    run_strategies(small_cfg, small_model, s, mc);
    const double serial = seconds_since(t1);
    mc.threads = 4;
    t1 = Clock::now();
    run_strategies(small_cfg, small_model, s, mc);
    const double parallel = seconds_since(t1);
    const double speedup = serial / parallel;
    return {session_s <= 60.0 && speedup >= 3.0,
            fmt::format("session of {} steps in {:.1f} s; 4-worker speedup {:.2f}x on {} hardware threads",
                        path.steps, session_s, speedup, std::thread::hardware_concurrency())};
}

Outcome bloomberg_baseline() {
    BloombergTCParams p;
    p.sigma_daily = 432.7;
    p.adv = 123456.0;
    p.spread = 2.0;
    const double tc = bloomberg_tc(p.adv, p);
    const bool exact = std::abs(tc - (432.7 / 3.0 + 1.0)) < 1e-12;

    auto spec = minutes_spec(10);
    auto model = synthetic_market(spec);
    auto cfg = session_config(spec);
    SurfaceSpec s;
    s.horizons = {7500, 15000};
    s.sizes = {50, 100, 200};
    s.interval_steps = 500;
    s.start_step = 3000;
    s.n_runs = 8;
    BloombergTCParams b;
    b.sigma_daily = 40.0;
    b.adv = 30000.0;
    b.spread = 2.0;
    s.bloomberg = b;
    auto surf = build_surface(cfg, model, s);
    std::size_t populated = 0;
    for (const auto& c : surf.cells) {
        for (const auto& r : c.costs) g_audit.add(r);
        populated += c.bloomberg_tc_bps.has_value() && std::isfinite(*c.bloomberg_tc_bps);
    }
    return {exact && populated == surf.cells.size(),
            fmt::format("TC(Q = ADV) = {:.6f}; comparison column populated in {}/{} cells", tc, populated,
                        surf.cells.size())};
}

Outcome decomposition_identity() {
    return {g_audit.records > 0 && g_audit.worst < 1e-9,
            fmt::format("{} runs, worst relative residual {:.2e}", g_audit.records, g_audit.worst)};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> check;
    };
    // Identity is reported last so that it covers every run of the other criteria.
    const std::vector<Criterion> criteria{
        {1, "matching-engine oracle equivalence", matching_oracle},
        {3, "pairing determinism", pairing_determinism},
        {4, "no-drift market risk", market_risk},
        {5, "emergent impact shape", impact_shape},
        {6, "square-root concavity", concavity},
        {7, "impact-fit recovery", impact_fit_recovery},
        {8, "rate and placement recovery", rate_and_placement_recovery},
        {9, "frontier ordering", frontier_ordering},
        {10, "surrogate optimizer", surrogate_optimizer},
        {11, "performance", performance},
        {12, "Bloomberg baseline", bloomberg_baseline},
        {2, "decomposition identity", decomposition_identity},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    std::map<int, std::string> lines;
    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        lines[c.id] = fmt::format("{} criterion {:>2} {}: {}", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail);
        std::fprintf(stderr, "%s\n", lines[c.id].c_str());
    }
    std::printf("\n");
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    return failures == 0 ? 0 : 1;
}
