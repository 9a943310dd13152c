#pragma once

#include <vector>

#include "lobsim/risk/cost.hpp"
#include "lobsim/sim/simulator.hpp"

namespace lobsim {

/// Mid at the end of the step before `start`, or the opening mid for
/// start 0. Shared by both runs of a pair.
double reference_price(const PathRecord& baseline, Step start);

/// Counterfactual minus baseline mid, per step.
std::vector<double> impact_series(const PathRecord& baseline, const PathRecord& counterfactual);

/// Cost of a counterfactual against its baseline.
CostRecord pair_cost(const PathRecord& baseline, const PathRecord& counterfactual, const ExecutionSchedule& schedule);

struct PairedResult {
    PathRecord baseline;
    PathRecord counterfactual;
    CostRecord cost;
    std::vector<double> impact;
};

/// Baseline without and counterfactual with the execution agent, sharing
/// every seed.
PairedResult run_paired(const SimConfig& config, const MarketModel& model, const SeedSet& seeds,
                        const ExecutionSchedule& schedule);

}  // namespace lobsim
