#include "lobsim/calib/rates.hpp"

namespace lobsim {

RateProfile estimate_rates(std::span<const HistoricalLimitOrder> limit_orders,
                           std::span<const HistoricalMarketOrder> market_orders, const SessionCalendar& calendar,
                           int days) {
    if (days < 1) throw ConfigError("rate estimation needs at least one day");
    RateProfile p;
    const double per_step = 1.0 / (static_cast<double>(days) * static_cast<double>(calendar.steps_per_minute()));
    auto slot = [](int minute) { return static_cast<std::size_t>(minute) % RateProfile::kMinutes; };
    for (const auto& o : limit_orders) p.alpha[slot(o.minute_of_day)] += per_step;
    for (const auto& o : market_orders) {
        p.mu[slot(o.minute_of_day)] += per_step;
        p.market_volume[slot(o.minute_of_day)] += static_cast<double>(o.volume) / days;
    }
    return p;
}

EmpiricalOrderDistribution build_distributions(std::span<const HistoricalLimitOrder> limit_orders,
                                               std::span<const HistoricalMarketOrder> market_orders,
                                               int origin_minute, int window_minutes) {
    EmpiricalOrderDistribution d(origin_minute, window_minutes);
    for (const auto& o : limit_orders) {
        if (o.no_reference || o.volume <= 0) continue;
        d.add_limit(o.spread_at_submit, o.minute_of_day, {o.depth, o.volume, o.duration_steps});
    }
    for (const auto& o : market_orders) {
        if (o.volume > 0) d.add_market(o.spread_at_submit, o.minute_of_day, o.volume);
    }
    if (!d.has_limits() && !d.has_markets()) throw DomainError("no historical orders to build placement distributions");
    return d;
}

}  // namespace lobsim
