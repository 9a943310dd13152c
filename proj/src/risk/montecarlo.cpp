#include "lobsim/risk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "lobsim/core/parallel.hpp"

namespace lobsim {

namespace {

struct RunOutput {
    std::vector<CostRecord> costs;
    std::vector<std::optional<ExecutionRecord>> records;
    std::vector<double> baseline;                   // curve window
    std::vector<std::vector<double>> counterfactual;  // per strategy
};

}  // namespace

MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    double var = ss / static_cast<double>(xs.size() - 1);
    r.se = std::sqrt(var / static_cast<double>(xs.size()));
    return r;
}

std::vector<StrategyRuns> run_strategies(const SimConfig& config, const MarketModel& model,
                                         std::span<const ExecutionSchedule> schedules, const MonteCarloSpec& spec) {
    return run_strategies(config, model, schedules, spec, FillObserver{});
}

std::vector<StrategyRuns> run_strategies(const SimConfig& config, const MarketModel& model,
                                         std::span<const ExecutionSchedule> schedules, const MonteCarloSpec& spec,
                                         const FillObserver& observer) {
    if (schedules.empty()) throw DomainError("no execution schedules to run");
    if (spec.n_runs == 0) throw DomainError("Monte Carlo needs at least one run");
    const Step total = config.total_steps();
    for (const auto& s : schedules) {
        if (s.end_step() > total) {
            throw DomainError(fmt::format("schedule '{}' ends at step {} beyond the simulated {} steps", s.strategy_id,
                                          s.end_step(), total));
        }
    }
    const Step from = std::clamp<Step>(spec.curve_from, 0, total);
    const Step to = std::clamp<Step>(spec.curve_to, from, total);
    const auto width = static_cast<std::size_t>(to - from);
    const std::size_t k = schedules.size();

    std::vector<StrategyRuns> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        out[j].id = schedules[j].strategy_id;
        out[j].costs.reserve(spec.n_runs);
        out[j].mean_baseline.assign(width, 0.0);
        out[j].mean_counterfactual.assign(width, 0.0);
    }

    const unsigned threads = resolve_threads(spec.threads);
    const std::size_t batch = std::max<std::size_t>(1, threads) * 2;
    for (std::size_t first = 0; first < spec.n_runs; first += batch) {
        const std::size_t count = std::min(batch, spec.n_runs - first);
        std::vector<RunOutput> outputs(count);
        parallel_for(count, threads, [&](std::size_t i) {
            const SeedSet seeds = SeedSet::for_run(spec.seed, first + i);
            RunOutput& ro = outputs[i];
            const PathRecord base = run_simulation(config, model, seeds);
            ro.baseline.assign(base.mids.begin() + from, base.mids.begin() + to);
            ro.costs.resize(k);
            ro.records.resize(k);
            ro.counterfactual.resize(k);
            for (std::size_t j = 0; j < k; ++j) {
                const PathRecord cf = run_simulation(config, model, seeds, &schedules[j]);
                ro.costs[j] = pair_cost(base, cf, schedules[j]);
                if (observer) ro.records[j] = cf.execution;
                ro.counterfactual[j].assign(cf.mids.begin() + from, cf.mids.begin() + to);
            }
        });
        for (std::size_t i = 0; i < count; ++i) {
            RunOutput& ro = outputs[i];
            for (std::size_t j = 0; j < k; ++j) {
                out[j].costs.push_back(ro.costs[j]);
                for (std::size_t t = 0; t < width; ++t) {
                    out[j].mean_baseline[t] += ro.baseline[t];
                    out[j].mean_counterfactual[t] += ro.counterfactual[j][t];
                }
                if (observer && ro.records[j]) observer(first + i, j, *ro.records[j]);
            }
        }
    }
    const double n = static_cast<double>(spec.n_runs);
    for (auto& s : out) {
        for (auto& v : s.mean_baseline) v /= n;
        for (auto& v : s.mean_counterfactual) v /= n;
    }
    return out;
}

}  // namespace lobsim
