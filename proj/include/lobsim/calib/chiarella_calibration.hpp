#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lobsim/agents/behaviours.hpp"
#include "lobsim/calib/stylized_facts.hpp"
#include "lobsim/calib/surrogate.hpp"
#include "lobsim/data/book_rebuild.hpp"
#include "lobsim/sim/simulator.hpp"

namespace lobsim {

/// Calibrated coordinates, in this order: kappa, beta_l, gamma_l, beta_h,
/// gamma_h, sigma. The EWMA weights stay fixed.
inline constexpr std::size_t kChiarellaDims = 6;
std::array<double, kChiarellaDims> chiarella_vector(const ChiarellaParams& p) noexcept;
ChiarellaParams chiarella_from_vector(std::span<const double> x, const ChiarellaParams& base);

struct ChiarellaBounds {
    ChiarellaParams lower;
    ChiarellaParams upper;

    /// Each calibrated parameter between `lo` and `hi` times its value in p.
    static ChiarellaBounds around(const ChiarellaParams& p, double lo = 0.5, double hi = 2.0);
    Bounds as_bounds() const;
};

/// Facts of a simulated path after warm-up; arrival counts per trading
/// minute cover the whole path.
StylizedFacts path_facts(const PathRecord& path, const FactsGrid& grid = {});

/// Facts of a rebuilt historical day on the same step grid.
StylizedFacts historical_facts(const StepSeries& series, std::span<const HistoricalLimitOrder> limit_orders,
                               std::span<const HistoricalMarketOrder> market_orders, const SessionCalendar& calendar,
                               const FactsGrid& grid = {});

struct CalibrationSetup {
    SimConfig sim;
    MarketModel model;
    FactsGrid grid;
    FactsWeights weights;
    int runs_per_point = 5;
    std::uint64_t seed = 1;  // every parameter point reuses runs 0..R-1 of this seed
    unsigned threads = 1;
};

/// Mean facts distance over the setup's R seeded runs at `params`.
double simulated_distance(const ChiarellaParams& params, const StylizedFacts& target, const CalibrationSetup& setup);

struct CalibrationRecord {
    ChiarellaParams params;
    double distance = 0.0;
};

struct CalibrationResult {
    ChiarellaParams params;
    double distance = 0.0;
    std::size_t design_size = 0;
    std::uint64_t seed = 0;
    std::vector<CalibrationRecord> log;
};

/// Surrogate search over the bounds. `budget` counts parameter points and
/// must cover the design (ten per free parameter unless given).
CalibrationResult calibrate_chiarella(const StylizedFacts& target, const CalibrationSetup& setup,
                                      const ChiarellaBounds& bounds, std::size_t budget, std::size_t design_size = 0);

}  // namespace lobsim
