#pragma once

#include <span>
#include <vector>

#include "lobsim/calib/impact_model.hpp"
#include "lobsim/core/session.hpp"
#include "lobsim/data/book_rebuild.hpp"

namespace lobsim {

struct FundamentalProxy {
    std::vector<double> v_hat;
    double sigma_v = 0.0;  // RMS per-step increment, zero drift assumed
};

/// Removes the cumulative single-trade impact from a per-step price series:
/// v_t = p_t - sum_{i<=t} sign(Q_i) f(|Q_i|).
FundamentalProxy extract_fundamental_proxy(std::span<const double> prices, std::span<const double> excess_demand,
                                           const ImpactModel& impact);

/// Signed market-order volume per step of day 0; orders outside the trading
/// windows are dropped.
std::vector<double> excess_demand_per_step(std::span<const HistoricalMarketOrder> market_orders,
                                           const SessionCalendar& calendar);

}  // namespace lobsim
