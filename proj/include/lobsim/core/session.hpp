#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lobsim/core/types.hpp"

namespace lobsim {

/// Continuous-trading window [start, end) in minutes since midnight.
struct SessionWindow {
    int start_minute = 0;
    int end_minute = 0;

    int minutes() const noexcept { return end_minute - start_minute; }
    bool operator==(const SessionWindow&) const = default;
};

/// Parses "HH:MM-HH:MM".
SessionWindow parse_window(std::string_view text);
std::string format_window(const SessionWindow& w);

/// Maps simulation steps to wall-clock time. Consecutive trading days are
/// stitched together: step 0 is the open of day 0 and non-trading time is
/// skipped entirely.
class SessionCalendar {
public:
    static constexpr std::int64_t kNsPerMs = 1'000'000;
    static constexpr std::int64_t kNsPerMinute = 60'000'000'000;

    SessionCalendar(std::vector<SessionWindow> windows, int step_ms = 20);

    const std::vector<SessionWindow>& windows() const noexcept { return windows_; }
    int step_ms() const noexcept { return step_ms_; }
    std::int64_t step_ns() const noexcept { return std::int64_t{step_ms_} * kNsPerMs; }
    Step steps_per_second() const noexcept { return 1000 / step_ms_; }
    Step steps_per_minute() const noexcept { return 60'000 / step_ms_; }
    Step steps_per_day() const noexcept { return steps_per_day_; }
    int trading_minutes() const noexcept { return trading_minutes_; }
    int open_minute() const noexcept { return windows_.front().start_minute; }

    int day(Step s) const noexcept { return static_cast<int>(s / steps_per_day_); }
    Step step_in_day(Step s) const noexcept { return s % steps_per_day_; }

    /// Nanoseconds since midnight of the step's day, at the start of the step.
    std::int64_t time_of_day_ns(Step s) const noexcept;
    int minute_of_day(Step s) const noexcept;
    /// Minute index counted over trading time only, across days.
    Step trading_minute(Step s) const noexcept { return s / steps_per_minute(); }

    /// Step (within day 0) containing the given time, or nullopt outside the
    /// trading windows.
    std::optional<Step> step_at(std::int64_t ns_of_day) const noexcept;

    /// First step whose minute_of_day equals the given minute, within day 0.
    std::optional<Step> first_step_of_minute(int minute_of_day) const noexcept;

private:
    std::vector<SessionWindow> windows_;
    int step_ms_;
    int trading_minutes_ = 0;
    Step steps_per_day_ = 0;
};

}  // namespace lobsim
