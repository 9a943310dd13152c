#pragma once

#include <cstdint>
#include <vector>

#include "lobsim/core/session.hpp"
#include "lobsim/sim/simulator.hpp"

namespace lobsim {

/// Knobs of a synthetic desk-scale market: an intraday U-shaped arrival
/// profile, geometric placement depths and uniform volumes. Stands in for a
/// calibration when no historical data is available.
struct SyntheticSpec {
    std::vector<SessionWindow> windows{{9 * 60 + 15, 16 * 60 + 30}};
    int step_ms = 20;
    double limit_per_step = 1.0;   // mean over the day
    double market_per_step = 0.1;
    double u_shape = 0.5;          // extra intensity at open/close relative to midday
    double depth_mean = 2.0;       // ticks from the opposite best, >= 1
    Qty limit_volume_max = 5;
    Qty market_volume_max = 5;
    double duration_mean = 100.0;  // steps
    Price open_bid = 18999;
    Price open_ask = 19001;
    int open_levels = 10;
    Qty open_level_volume = 100;
    ImpactModel impact{0.025, 0.5};
    double sigma_v = 0.05;         // ticks per step
    std::size_t placement_samples = 20000;
    std::uint64_t seed = 1;
};

MarketModel synthetic_market(const SyntheticSpec& spec);

/// Chiarella parameters sized for the synthetic market: the calibrated
/// defaults with a weaker pull towards the fundamental.
ChiarellaParams synthetic_chiarella();

/// Multiplicative intraday intensity shape with mean one over the session.
std::vector<double> u_shape_profile(const SessionCalendar& calendar, double u_shape);

}  // namespace lobsim
