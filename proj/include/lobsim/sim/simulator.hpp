#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lobsim/agents/behaviours.hpp"
#include "lobsim/agents/placement.hpp"
#include "lobsim/agents/rate_profile.hpp"
#include "lobsim/calib/impact_model.hpp"
#include "lobsim/core/rng.hpp"
#include "lobsim/core/session.hpp"
#include "lobsim/exec/schedule.hpp"
#include "lobsim/lob/order_book.hpp"

namespace lobsim {

enum class ModelMode : std::uint8_t { Chiarella, ZeroIntelligence };

/// Duration: each ZI order carries a geometric lifetime. PerStep: every
/// resting ZI order is cancelled with probability delta at each step.
enum class ZiCancelMode : std::uint8_t { Duration, PerStep };

struct AgentCounts {
    int fundamental = 1;
    int momentum_hf = 1;
    int momentum_lf = 1;
    int noise = 1;
    int zi = 1;
};

struct RecordOptions {
    bool spreads = false;
    bool trades = false;
    bool events = false;
    bool fundamental = false;
};

struct SimConfig {
    SessionCalendar calendar{{SessionWindow{9 * 60 + 15, 16 * 60 + 30}}};
    int days = 1;
    ModelMode mode = ModelMode::Chiarella;
    AgentCounts agents;
    ChiarellaParams chiarella;
    ZIParams zi;
    bool zi_use_rate_profile = false;  // take alpha/mu per minute from the rate profile
    ZiCancelMode zi_cancel = ZiCancelMode::Duration;
    double drift = 0.0;       // g_V per step
    Step warmup_steps = 1000;
    Step max_steps = 0;       // 0: days * steps_per_day
    RecordOptions record;

    Step total_steps() const noexcept;
};

/// Everything a run needs from calibration.
struct MarketModel {
    RateProfile rates;
    EmpiricalOrderDistribution placement;
    ImpactModel impact;
    std::vector<PriceLevel> opening_bids;  // best first
    std::vector<PriceLevel> opening_asks;
    double initial_fundamental = 0.0;  // 0: opening mid
    double sigma_v = 0.0;              // per step

    double opening_mid() const;
};

struct PathRecord {
    Step steps = 0;
    Step warmup = 0;
    double opening_mid = 0.0;
    std::vector<double> mids;  // end-of-step mid, carried when a side is empty
    std::vector<Price> spreads;
    std::vector<Trade> trades;
    std::vector<EngineEvent> events;
    std::vector<std::int64_t> limit_per_minute;  // agent submissions per trading minute
    std::vector<std::int64_t> market_per_minute;
    std::vector<std::int8_t> order_signs;  // one per market order that traded
    std::vector<double> fundamental;       // V_t
    std::vector<double> reflexive;         // X_t
    std::optional<ExecutionRecord> execution;
    Step carried_steps = 0;  // steps ending with a one-sided book
    std::int64_t trade_count = 0;
    Qty traded_volume = 0;
};

/// Runs one path. With a schedule, the execution agent acts last in every
/// step; without one no execution agent exists.
PathRecord run_simulation(const SimConfig& config, const MarketModel& model, const SeedSet& seeds,
                          const ExecutionSchedule* schedule = nullptr);

/// First order id of an agent's id space.
constexpr OrderId agent_id_base(std::size_t agent_index) noexcept {
    return static_cast<OrderId>((agent_index + 2) << 40);
}

}  // namespace lobsim
