#pragma once

#include <span>

#include "lobsim/agents/placement.hpp"
#include "lobsim/agents/rate_profile.hpp"
#include "lobsim/core/session.hpp"
#include "lobsim/data/book_rebuild.hpp"

namespace lobsim {

/// Per-minute arrival counts averaged over `days` and divided by the steps in
/// a minute. Market volume per minute is averaged over days only. Minutes
/// without orders get rate zero.
RateProfile estimate_rates(std::span<const HistoricalLimitOrder> limit_orders,
                           std::span<const HistoricalMarketOrder> market_orders, const SessionCalendar& calendar,
                           int days = 1);

/// Buckets every historical order by spread and time of day. Limit orders
/// submitted against an empty opposite side carry no depth and are skipped.
/// Throws DomainError when nothing usable remains.
EmpiricalOrderDistribution build_distributions(std::span<const HistoricalLimitOrder> limit_orders,
                                               std::span<const HistoricalMarketOrder> market_orders,
                                               int origin_minute, int window_minutes = 30);

}  // namespace lobsim
