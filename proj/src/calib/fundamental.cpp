#include "lobsim/calib/fundamental.hpp"

#include <cmath>

namespace lobsim {

FundamentalProxy extract_fundamental_proxy(std::span<const double> prices, std::span<const double> excess_demand,
                                           const ImpactModel& impact) {
    if (prices.size() != excess_demand.size()) throw DomainError("price and excess-demand series differ in length");
    FundamentalProxy out;
    out.v_hat.resize(prices.size());
    double cumulative = 0.0;
    for (std::size_t t = 0; t < prices.size(); ++t) {
        cumulative += impact.signed_impact(excess_demand[t]);
        out.v_hat[t] = prices[t] - cumulative;
    }
    if (prices.size() >= 2) {
        double ss = 0.0;
        for (std::size_t t = 1; t < out.v_hat.size(); ++t) {
            double d = out.v_hat[t] - out.v_hat[t - 1];
            ss += d * d;
        }
        out.sigma_v = std::sqrt(ss / static_cast<double>(out.v_hat.size() - 1));
    }
    return out;
}

std::vector<double> excess_demand_per_step(std::span<const HistoricalMarketOrder> market_orders,
                                           const SessionCalendar& calendar) {
    std::vector<double> q(static_cast<std::size_t>(calendar.steps_per_day()), 0.0);
    for (const auto& m : market_orders) {
        auto s = calendar.step_at(m.time_ns);
        if (s) q[static_cast<std::size_t>(*s)] += side_sign(m.side) * static_cast<double>(m.volume);
    }
    return q;
}

}  // namespace lobsim
