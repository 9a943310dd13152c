#include "lobsim/exec/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace lobsim {

Qty ExecutionSchedule::scheduled() const noexcept {
    Qty s = 0;
    for (const auto& sl : slices) s += sl.quantity;
    return s;
}

ExecutionSchedule build_uniform_schedule(const MetaOrder& meta, Step interval_steps) {
    if (interval_steps <= 0) throw ConfigError("slice interval must be positive");
    if (meta.quantity < 0 || meta.horizon < 1) throw ConfigError("meta-order needs quantity >= 0 and horizon >= 1");
    ExecutionSchedule s{meta.strategy_id, meta.side, meta.quantity, meta.start_step, meta.horizon, {}};
    const Step slots = std::max<Step>(1, meta.horizon / interval_steps);
    const Qty base = meta.quantity / slots;
    const Qty extra = meta.quantity % slots;
    for (Step i = 0; i < slots; ++i) {
        Qty q = base + (i < extra ? 1 : 0);
        if (q > 0) s.slices.push_back({meta.start_step + i * interval_steps, q});
    }
    return s;
}

std::vector<Qty> allocate_largest_remainder(Qty total, std::span<const double> weights) {
    std::vector<Qty> out(weights.size(), 0);
    if (weights.empty()) return out;
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) throw DomainError("allocation weights must be finite and non-negative");
        sum += w;
    }
    std::vector<double> w(weights.begin(), weights.end());
    if (sum <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0);
        sum = static_cast<double>(w.size());
    }
    std::vector<std::pair<double, std::size_t>> remainders;
    remainders.reserve(w.size());
    Qty assigned = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double exact = static_cast<double>(total) * w[i] / sum;
        auto whole = static_cast<Qty>(std::floor(exact + 1e-9));
        out[i] = whole;
        assigned += whole;
        remainders.emplace_back(exact - static_cast<double>(whole), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    // Rounding can only leave a shortfall smaller than the number of slots.
    for (std::size_t k = 0; assigned < total; ++k) {
        ++out[remainders[k % remainders.size()].second];
        ++assigned;
    }
    while (assigned > total) {
        auto it = std::max_element(out.begin(), out.end());
        --*it;
        --assigned;
    }
    return out;
}

std::vector<Qty> split_daily(Qty total, std::span<const double> fractions) {
    if (fractions.empty()) throw ConfigError("daily fractions must not be empty");
    double sum = std::accumulate(fractions.begin(), fractions.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(fmt::format("daily fractions sum to {}, not 1", sum));
    return allocate_largest_remainder(total, fractions);
}

std::vector<VwapBin> vwap_bins(const RateProfile& profile, const SessionCalendar& calendar, Step from, Step to,
                               Step bin_steps) {
    if (bin_steps <= 0) throw ConfigError("VWAP bin length must be positive");
    std::vector<VwapBin> bins;
    for (Step s = from; s < to; s += bin_steps) {
        bins.push_back({s, profile.volume_at(calendar.minute_of_day(s))});
    }
    return bins;
}

std::vector<Qty> build_vwap_slices(Qty day_quantity, std::span<const double> bin_weights) {
    return allocate_largest_remainder(day_quantity, bin_weights);
}

ExecutionSchedule build_daily_schedule(const MetaOrder& meta, std::span<const double> daily_fractions,
                                       const RateProfile& profile, const SessionCalendar& calendar,
                                       Step bin_steps) {
    auto daily = split_daily(meta.quantity, daily_fractions);
    const Step spd = calendar.steps_per_day();
    const int first_day = calendar.day(meta.start_step);
    ExecutionSchedule s{meta.strategy_id, meta.side, meta.quantity, meta.start_step,
                        static_cast<Step>(daily.size()) * spd - calendar.step_in_day(meta.start_step), {}};
    for (std::size_t d = 0; d < daily.size(); ++d) {
        const Step day_open = (first_day + static_cast<Step>(d)) * spd;
        const Step from = d == 0 ? meta.start_step : day_open;
        const Step to = day_open + spd;
        auto bins = vwap_bins(profile, calendar, from, to, bin_steps);
        std::vector<double> w;
        w.reserve(bins.size());
        for (const auto& b : bins) w.push_back(b.weight);
        auto q = build_vwap_slices(daily[d], w);
        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (q[i] > 0) s.slices.push_back({bins[i].step, q[i]});
        }
    }
    return s;
}

Qty ExecutionRecord::executed() const noexcept {
    Qty e = 0;
    for (const auto& f : fills) e += f.quantity;
    return e;
}

double ExecutionRecord::executed_fraction() const noexcept {
    if (scheduled <= 0) return 1.0;
    return static_cast<double>(executed()) / static_cast<double>(scheduled);
}

ExecutionAgent::ExecutionAgent(const ExecutionSchedule& schedule, AgentId agent_id)
    : schedule_(&schedule), agent_id_(agent_id) {
    record_.side = schedule.side;
    record_.scheduled = schedule.scheduled();
}

std::optional<SubmitResult> ExecutionAgent::act(Step step, OrderBook& book, OrderId order_id) {
    Qty due = 0;
    while (next_ < schedule_->slices.size() && schedule_->slices[next_].step <= step) {
        due += schedule_->slices[next_].quantity;
        ++next_;
    }
    if (due <= 0) return std::nullopt;
    Order o;
    o.id = order_id;
    o.agent_id = agent_id_;
    o.side = schedule_->side;
    o.kind = OrderKind::Market;
    o.quantity = due;
    o.submit_step = step;
    auto result = book.submit_market(o);
    for (const auto& t : result.trades) record_.fills.push_back({step, t.price, t.quantity});
    record_.residual += due - result.filled;
    return result;
}

}  // namespace lobsim
