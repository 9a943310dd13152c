#include "lobsim/risk/paired.hpp"

#include <fmt/format.h>

namespace lobsim {

double reference_price(const PathRecord& baseline, Step start) {
    if (start <= 0) return baseline.opening_mid;
    if (static_cast<std::size_t>(start - 1) >= baseline.mids.size()) {
        throw DomainError(fmt::format("meta-order start {} lies beyond the simulated path", start));
    }
    return baseline.mids[static_cast<std::size_t>(start - 1)];
}

std::vector<double> impact_series(const PathRecord& baseline, const PathRecord& counterfactual) {
    if (baseline.mids.size() != counterfactual.mids.size()) throw DomainError("paired paths differ in length");
    std::vector<double> out(baseline.mids.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = counterfactual.mids[t] - baseline.mids[t];
    return out;
}

CostRecord pair_cost(const PathRecord& baseline, const PathRecord& counterfactual, const ExecutionSchedule& schedule) {
    const double ref = reference_price(baseline, schedule.start_step);
    CostRecord c;
    if (counterfactual.execution) {
        c = decompose(counterfactual.execution->fills, baseline.mids, ref, schedule.side);
        c.executed_fraction = counterfactual.execution->executed_fraction();
    } else {
        c.reference = ref;
        c.executed_fraction = 1.0;
    }
    return c;
}

PairedResult run_paired(const SimConfig& config, const MarketModel& model, const SeedSet& seeds,
                        const ExecutionSchedule& schedule) {
    PairedResult r;
    r.baseline = run_simulation(config, model, seeds);
    r.counterfactual = run_simulation(config, model, seeds, &schedule);
    r.cost = pair_cost(r.baseline, r.counterfactual, schedule);
    r.impact = impact_series(r.baseline, r.counterfactual);
    return r;
}

}  // namespace lobsim
