#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobsim/agents/rate_profile.hpp"
#include "lobsim/core/session.hpp"
#include "lobsim/core/types.hpp"
#include "lobsim/lob/order_book.hpp"

namespace lobsim {

/// A large parent order to be worked over [start_step, start_step + horizon).
struct MetaOrder {
    Side side = Side::Sell;
    Qty quantity = 0;
    Step start_step = 0;
    Step horizon = 1;
    std::string strategy_id;
};

struct Slice {
    Step step = 0;
    Qty quantity = 0;
    bool operator==(const Slice&) const = default;
};

/// Child market orders in step order. Unfilled slice remainders are dropped
/// and reported as residual, never rolled forward.
struct ExecutionSchedule {
    std::string strategy_id;
    Side side = Side::Sell;
    Qty total = 0;
    Step start_step = 0;
    Step horizon = 1;
    std::vector<Slice> slices;

    Qty scheduled() const noexcept;
    Step end_step() const noexcept { return start_step + horizon; }
};

/// Equal slices every `interval_steps`; the remainder goes one contract each
/// to the earliest slices. Zero-size slices are omitted.
ExecutionSchedule build_uniform_schedule(const MetaOrder& meta, Step interval_steps);

/// Integer split proportional to `weights` with largest-remainder rounding;
/// ties go to the earlier index. All-zero weights fall back to uniform.
std::vector<Qty> allocate_largest_remainder(Qty total, std::span<const double> weights);

/// Quantities per day; the fractions must sum to 1 within 1e-9.
std::vector<Qty> split_daily(Qty total, std::span<const double> fractions);

/// VWAP bins of `bin_steps` covering [from, to): one weight per bin equal to
/// the historical market volume of the bin's minute.
struct VwapBin {
    Step step = 0;
    double weight = 0.0;
};
std::vector<VwapBin> vwap_bins(const RateProfile& profile, const SessionCalendar& calendar, Step from, Step to,
                               Step bin_steps);

/// Slices of one day's quantity proportional to the bin weights. Returns one
/// quantity per bin (zeros included).
std::vector<Qty> build_vwap_slices(Qty day_quantity, std::span<const double> bin_weights);

/// Daily fractions, each day's quantity sliced intraday by VWAP bins. The
/// first day starts at meta.start_step; later days start at their open.
ExecutionSchedule build_daily_schedule(const MetaOrder& meta, std::span<const double> daily_fractions,
                                       const RateProfile& profile, const SessionCalendar& calendar,
                                       Step bin_steps);

struct Fill {
    Step step = 0;
    Price price = 0;
    Qty quantity = 0;
    bool operator==(const Fill&) const = default;
};

struct ExecutionRecord {
    Side side = Side::Sell;
    Qty scheduled = 0;
    Qty residual = 0;
    std::vector<Fill> fills;

    Qty executed() const noexcept;
    /// 1 when nothing was scheduled.
    double executed_fraction() const noexcept;
};

/// Works an ExecutionSchedule inside the simulation loop as the last agent
/// of each step.
class ExecutionAgent {
public:
    ExecutionAgent(const ExecutionSchedule& schedule, AgentId agent_id);
    ExecutionAgent(ExecutionSchedule&&, AgentId) = delete;

    /// Submits every slice due at `step` as one market order. Empty when
    /// nothing was due.
    std::optional<SubmitResult> act(Step step, OrderBook& book, OrderId order_id);

    const ExecutionRecord& record() const noexcept { return record_; }
    bool finished() const noexcept { return next_ >= schedule_->slices.size(); }

private:
    const ExecutionSchedule* schedule_;
    AgentId agent_id_;
    std::size_t next_ = 0;
    ExecutionRecord record_;
};

}  // namespace lobsim
