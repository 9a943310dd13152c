#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lobsim/core/types.hpp"

namespace lobsim {

/// Fixed-edge histogram of probabilities. Values outside the edges fall into
/// the first or last bin.
struct Histogram {
    std::vector<double> edges;  // n + 1 ascending
    std::vector<double> probs;  // n, sums to 1 (all zero when empty)

    static Histogram uniform_edges(double lo, double hi, std::size_t bins);
    void fill(std::span<const double> values);
    bool same_grid(const Histogram& other) const noexcept { return edges == other.edges; }
};

struct FactsGrid {
    int steps_per_second = 50;
    double spread_max = 10.0;       // spread bins 1..spread_max, last open-ended
    double return_1s_range = 10.0;  // ticks
    double return_60s_range = 60.0;
    std::size_t return_bins = 40;
    int lags_1s = 20;
    int lags_60s = 10;
    int lags_sign = 50;
};

/// Autocorrelation at lags 1..K plus a flag for zero-variance series, whose
/// curve is reported as zeros.
struct AcfCurve {
    std::vector<double> values;
    bool degenerate = false;
};

struct StylizedFacts {
    std::vector<double> limit_per_minute;
    std::vector<double> market_per_minute;
    Histogram spread;
    Histogram return_1s;
    Histogram abs_return_1s;
    Histogram return_60s;
    Histogram abs_return_60s;
    AcfCurve acf_return_1s;
    AcfCurve acf_abs_return_1s;
    AcfCurve acf_return_60s;
    AcfCurve acf_abs_return_60s;
    AcfCurve acf_order_sign;
};

/// Everything the facts need, on the simulation step grid.
struct FactsInput {
    std::span<const double> mids;      // one per step
    std::span<const Price> spreads;    // one per step, may be empty
    std::span<const double> limit_per_minute;
    std::span<const double> market_per_minute;
    std::span<const std::int8_t> order_signs;
};

/// Throws DomainError for series shorter than two minutes.
StylizedFacts compute_stylized_facts(const FactsInput& input, const FactsGrid& grid = {});

/// Lag-k covariance over its n - k pairs divided by the variance, clamped to
/// [-1, 1].
AcfCurve autocorrelation(std::span<const double> x, int max_lag);

/// Rate weights default to 1/3000 so per-minute counts compare on the scale
/// of per-step probabilities at 20 ms steps.
struct FactsWeights {
    double limit_rate = 1.0 / 3000.0;
    double market_rate = 1.0 / 3000.0;
    double spread = 1.0;
    double return_1s = 1.0;
    double abs_return_1s = 1.0;
    double return_60s = 1.0;
    double abs_return_60s = 1.0;
    double acf_return_1s = 1.0;
    double acf_abs_return_1s = 1.0;
    double acf_return_60s = 1.0;
    double acf_abs_return_60s = 1.0;
    double acf_order_sign = 1.0;
};

/// 1-Wasserstein distance between histograms on one grid.
double wasserstein1(const Histogram& a, const Histogram& b);
double rmse(std::span<const double> a, std::span<const double> b);

/// Weighted sum of per-fact distances: W1 for histograms, RMSE for curves and
/// rates. Throws DomainError when the grids differ.
double facts_distance(const StylizedFacts& a, const StylizedFacts& b, const FactsWeights& weights = {});

}  // namespace lobsim
