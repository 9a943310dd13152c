#include "lobsim/agents/behaviours.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lobsim {

void ZIParams::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(alpha) || !prob(mu) || !(delta > 0.0 && delta < 1.0) || !(lambda > 0.0) || limit_volume_max < 1 ||
        market_volume_max < 1) {
        throw ConfigError("invalid zero-intelligence parameters");
    }
}

void ChiarellaParams::validate() const {
    bool ok = kappa > 0 && beta_h > 0 && gamma_h > 0 && beta_l > 0 && gamma_l > 0 && sigma > 0 && eta_h > 0 &&
              eta_h <= 1 && eta_l > 0 && eta_l <= 1;
    if (!ok) throw ConfigError("invalid Chiarella parameters");
}

Price round_to_tick(double price, Side side) noexcept {
    double fl = std::floor(price);
    double frac = price - fl;
    if (frac < 0.5) return static_cast<Price>(fl);
    if (frac > 0.5) return static_cast<Price>(fl) + 1;
    return side == Side::Buy ? static_cast<Price>(fl) : static_cast<Price>(fl) + 1;
}

IntentList zi_step(double prev_mid, const ZIParams& p, RandomStream& rng) {
    IntentList out;
    const bool limit = rng.uniform() < p.alpha;
    const bool market = rng.uniform() < p.mu;
    if (limit) {
        Side side = rng.uniform() < 0.5 ? Side::Buy : Side::Sell;
        double depth = rng.exponential(p.lambda);
        // Geometric lifetime identical in law to cancelling with probability delta each step.
        double life = rng.exponential(-std::log1p(-p.delta));
        Qty vol = p.limit_volume_max > 1 ? 1 + static_cast<Qty>(rng.index(static_cast<std::uint64_t>(p.limit_volume_max))) : 1;
        double raw = side == Side::Buy ? prev_mid - depth : prev_mid + depth;
        out.push({side, OrderKind::Limit, round_to_tick(raw, side), vol, std::max<Step>(1, static_cast<Step>(std::ceil(life)))});
    }
    if (market) {
        Side side = rng.uniform() < 0.5 ? Side::Buy : Side::Sell;
        Qty vol = p.market_volume_max > 1 ? 1 + static_cast<Qty>(rng.index(static_cast<std::uint64_t>(p.market_volume_max))) : 1;
        out.push({side, OrderKind::Market, 0, vol, 0});
    }
    return out;
}

double fundamental_demand(const FundamentalState& s, Price best_bid, Price best_ask, double kappa) noexcept {
    const double v = s.value;
    if (v > static_cast<double>(best_ask)) return kappa * (s.reflexive_value() - static_cast<double>(best_ask));
    if (v < static_cast<double>(best_bid)) return kappa * (s.reflexive_value() - static_cast<double>(best_bid));
    return 0.0;
}

double update_reflexive(FundamentalState& s, double excess_demand, const ImpactModel& impact) noexcept {
    s.reflexive += impact.signed_impact(excess_demand);
    return s.reflexive;
}

double update_fundamental(FundamentalState& s, RandomStream& rng) {
    double shock = rng.normal();
    s.value += s.drift + s.volatility * shock;
    return s.value;
}

double momentum_demand(MomentumState& s, double prev_mid, double mid, double beta, double gamma, double eta) noexcept {
    s.trend = (1.0 - eta) * s.trend + eta * (mid - prev_mid);
    return beta * std::tanh(gamma * s.trend);
}

double noise_demand(double sigma, RandomStream& rng) { return sigma * rng.normal(); }

IntentDecision demand_to_intents(double demand, double alpha, double mu, RandomStream& rng) noexcept {
    const double u_limit = rng.uniform();
    const double u_market = rng.uniform();
    IntentDecision d;
    if (demand == 0.0) return d;
    d.side = demand > 0.0 ? Side::Buy : Side::Sell;
    const double mag = std::abs(demand);
    d.limit = u_limit < std::clamp(alpha * mag, 0.0, 1.0);
    d.market = u_market < std::clamp(mu * mag, 0.0, 1.0);
    return d;
}

Placement sample_limit_placement(const EmpiricalOrderDistribution& dist, Price spread, int minute_of_day, Side side,
                                 Price best_bid, Price best_ask, RandomStream& rng) {
    const auto& pool = dist.limit_pool(spread, minute_of_day);
    const LimitPlacement& t = pool[rng.index(pool.size())];
    Placement p;
    p.source = t;
    p.price = side == Side::Buy ? best_ask - t.depth : best_bid + t.depth;
    p.volume = t.volume;
    p.duration = std::max<Step>(1, t.duration);
    return p;
}

Qty sample_market_volume(const EmpiricalOrderDistribution& dist, Price spread, int minute_of_day, RandomStream& rng) {
    const auto& pool = dist.market_pool(spread, minute_of_day);
    return pool[rng.index(pool.size())];
}

}  // namespace lobsim
