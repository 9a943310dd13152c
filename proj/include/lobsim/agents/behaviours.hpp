#pragma once

#include <array>
#include <optional>

#include "lobsim/agents/placement.hpp"
#include "lobsim/calib/impact_model.hpp"
#include "lobsim/core/rng.hpp"
#include "lobsim/core/types.hpp"

namespace lobsim {

/// Zero-Intelligence trader: per-step Bernoulli limit/market arrivals,
/// exponential depth from the mid, geometric lifetimes.
struct ZIParams {
    double alpha = 0.5;    // limit probability per step
    double mu = 0.05;      // market probability per step
    double delta = 0.002;  // cancel probability per step
    double lambda = 0.5;   // depth rate, 1/ticks
    Qty limit_volume_max = 1;   // volumes uniform on [1, max]
    Qty market_volume_max = 1;

    void validate() const;
};

struct ChiarellaParams {
    double kappa = 0.011;
    double beta_h = 0.530;
    double gamma_h = 290000.0;
    double eta_h = 0.98;
    double beta_l = 1.976;
    double gamma_l = 5.26;
    double eta_l = 1.7e-4;
    double sigma = 0.249;

    void validate() const;
    bool operator==(const ChiarellaParams&) const = default;
};

/// Exogenous fundamental V and the reflexive adjustment X accumulated from
/// traded excess demand.
struct FundamentalState {
    double value = 0.0;      // V_t, ticks
    double reflexive = 0.0;  // X_t, ticks
    double drift = 0.0;      // per step
    double volatility = 0.0; // per step

    double reflexive_value() const noexcept { return value + reflexive; }
};

struct MomentumState {
    double trend = 0.0;  // EWMA of mid changes, ticks
};

struct OrderIntent {
    Side side = Side::Buy;
    OrderKind kind = OrderKind::Limit;
    Price price = 0;
    Qty quantity = 0;
    Step duration = 0;
};

struct IntentList {
    std::array<OrderIntent, 2> items{};
    int size = 0;

    void push(const OrderIntent& i) noexcept { items[static_cast<std::size_t>(size++)] = i; }
    const OrderIntent* begin() const noexcept { return items.data(); }
    const OrderIntent* end() const noexcept { return items.data() + size; }
    bool empty() const noexcept { return size == 0; }
};

/// Nearest tick; exact halves round away from the market (down for buys,
/// up for sells).
Price round_to_tick(double price, Side side) noexcept;

/// Draw order: limit Bernoulli, market Bernoulli, then per emitted intent
/// side, depth, lifetime, volume.
IntentList zi_step(double prev_mid, const ZIParams& params, RandomStream& rng);

/// Conditions test V against the quotes while values use V + X.
double fundamental_demand(const FundamentalState& state, Price best_bid, Price best_ask, double kappa) noexcept;

/// X += sign(Q) f(|Q|); returns the new X.
double update_reflexive(FundamentalState& state, double excess_demand, const ImpactModel& impact) noexcept;

/// V += drift + volatility * N(0,1); always consumes one normal draw.
double update_fundamental(FundamentalState& state, RandomStream& rng);

/// Updates the EWMA with the latest mid change and returns beta * tanh(gamma * M).
double momentum_demand(MomentumState& state, double prev_mid, double mid, double beta, double gamma,
                       double eta) noexcept;

double noise_demand(double sigma, RandomStream& rng);

struct IntentDecision {
    bool limit = false;
    bool market = false;
    Side side = Side::Buy;
};

/// Two uniforms are always consumed (limit first); side follows the sign of
/// the demand, probabilities are alpha|D| and mu|D| clamped to [0, 1].
IntentDecision demand_to_intents(double demand, double alpha, double mu, RandomStream& rng) noexcept;

struct Placement {
    Price price = 0;
    Qty volume = 0;
    Step duration = 0;
    LimitPlacement source;
};

/// Uniform draw of one historical tuple; buys are placed below the previous
/// best ask, sells above the previous best bid.
Placement sample_limit_placement(const EmpiricalOrderDistribution& dist, Price spread, int minute_of_day, Side side,
                                 Price best_bid, Price best_ask, RandomStream& rng);

Qty sample_market_volume(const EmpiricalOrderDistribution& dist, Price spread, int minute_of_day, RandomStream& rng);

}  // namespace lobsim
