#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lobsim/risk/cost.hpp"

namespace lobsim {

/// E: mean market-impact cost (bps). V: variance of total cost (bps^2).
struct FrontierPoint {
    std::string strategy_id;
    double mean_cost_bps = 0.0;
    double var_cost_bps2 = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
    std::size_t n_runs = 0;

    double utility(double lambda_risk) const noexcept { return mean_cost_bps + lambda_risk * var_cost_bps2; }
};

/// Valid runs only. Standard errors are jackknife estimates.
FrontierPoint summarize_strategy(const std::string& id, std::span<const CostRecord> runs);

double frontier_mean(std::span<const CostRecord> runs);
double frontier_variance(std::span<const CostRecord> runs);

/// Difference stat(a) - stat(b) over paired runs (same run index shares
/// seeds) with its leave-one-pair-out jackknife standard error. Pairs where
/// either run has no fills are dropped.
struct PairedDifference {
    double difference = 0.0;
    double se = 0.0;
    std::size_t pairs = 0;
};
using RunStatistic = std::function<double(std::span<const CostRecord>)>;
PairedDifference paired_difference(std::span<const CostRecord> a, std::span<const CostRecord> b,
                                   const RunStatistic& stat);

struct FrontierResult {
    std::vector<FrontierPoint> points;
    std::vector<double> lambdas;
    std::vector<std::size_t> optimal;   // per lambda, index into points
    std::vector<std::size_t> envelope;  // lower convex envelope in (V, E), by increasing V
};

/// Utility minimizer for each lambda (ties to the lower variance, then the
/// earlier point) and the set of points optimal for some lambda >= 0.
FrontierResult efficient_frontier(std::vector<FrontierPoint> points, std::span<const double> lambdas);

void write_frontier_csv(const std::filesystem::path& path, const FrontierResult& frontier,
                        const std::string& header_comment);
void write_frontier_optimal_csv(const std::filesystem::path& path, const FrontierResult& frontier,
                                const std::string& header_comment);

}  // namespace lobsim
