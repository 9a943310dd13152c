#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lobsim/risk/paired.hpp"

namespace lobsim {

struct MonteCarloSpec {
    std::size_t n_runs = 50;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    // Mean mid curves are kept over [curve_from, curve_to) when curve_to > curve_from.
    Step curve_from = 0;
    Step curve_to = 0;
};

struct StrategyRuns {
    std::string id;
    std::vector<CostRecord> costs;  // by run index
    std::vector<double> mean_baseline;
    std::vector<double> mean_counterfactual;
};

/// Runs n_runs seeds. Each seed simulates one baseline shared by the
/// counterfactuals of every schedule. Results do not depend on the worker
/// count: runs are reduced in run-index order.
std::vector<StrategyRuns> run_strategies(const SimConfig& config, const MarketModel& model,
                                         std::span<const ExecutionSchedule> schedules, const MonteCarloSpec& spec);

/// Called once per (run, strategy) in run-index order from the calling thread.
using FillObserver = std::function<void(std::size_t run, std::size_t strategy, const ExecutionRecord&)>;
std::vector<StrategyRuns> run_strategies(const SimConfig& config, const MarketModel& model,
                                         std::span<const ExecutionSchedule> schedules, const MonteCarloSpec& spec,
                                         const FillObserver& observer);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

}  // namespace lobsim
