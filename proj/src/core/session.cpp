#include "lobsim/core/session.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

namespace lobsim {

namespace {

int parse_hhmm(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ConfigError(fmt::format("bad time '{}'", text));
    int h = -1, m = -1;
    auto r1 = std::from_chars(text.data(), text.data() + colon, h);
    auto r2 = std::from_chars(text.data() + colon + 1, text.data() + text.size(), m);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || h < 0 || h > 24 || m < 0 || m > 59) {
        throw ConfigError(fmt::format("bad time '{}'", text));
    }
    return h * 60 + m;
}

}  // namespace

SessionWindow parse_window(std::string_view text) {
    auto dash = text.find('-');
    if (dash == std::string_view::npos) throw ConfigError(fmt::format("bad session window '{}'", text));
    SessionWindow w{parse_hhmm(text.substr(0, dash)), parse_hhmm(text.substr(dash + 1))};
    if (w.end_minute <= w.start_minute) throw ConfigError(fmt::format("empty session window '{}'", text));
    return w;
}

std::string format_window(const SessionWindow& w) {
    return fmt::format("{:02}:{:02}-{:02}:{:02}", w.start_minute / 60, w.start_minute % 60,
                       w.end_minute / 60, w.end_minute % 60);
}

SessionCalendar::SessionCalendar(std::vector<SessionWindow> windows, int step_ms)
    : windows_(std::move(windows)), step_ms_(step_ms) {
    if (step_ms_ <= 0 || 1000 % step_ms_ != 0) {
        throw ConfigError(fmt::format("step length {} ms must be positive and divide one second", step_ms_));
    }
    if (windows_.empty()) throw ConfigError("at least one session window is required");
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        if (windows_[i].end_minute <= windows_[i].start_minute) throw ConfigError("empty session window");
        if (i > 0 && windows_[i].start_minute < windows_[i - 1].end_minute) {
            throw ConfigError("session windows must be ordered and non-overlapping");
        }
        trading_minutes_ += windows_[i].minutes();
    }
    steps_per_day_ = Step{trading_minutes_} * steps_per_minute();
}

std::int64_t SessionCalendar::time_of_day_ns(Step s) const noexcept {
    Step in_day = step_in_day(s);
    Step minute = in_day / steps_per_minute();
    Step rem = in_day % steps_per_minute();
    for (const auto& w : windows_) {
        if (minute < w.minutes()) {
            return (w.start_minute + minute) * kNsPerMinute + rem * step_ns();
        }
        minute -= w.minutes();
    }
    return windows_.back().end_minute * kNsPerMinute;
}

int SessionCalendar::minute_of_day(Step s) const noexcept {
    return static_cast<int>(time_of_day_ns(s) / kNsPerMinute);
}

std::optional<Step> SessionCalendar::step_at(std::int64_t ns_of_day) const noexcept {
    Step offset = 0;
    for (const auto& w : windows_) {
        std::int64_t start = w.start_minute * kNsPerMinute;
        std::int64_t end = w.end_minute * kNsPerMinute;
        if (ns_of_day >= start && ns_of_day < end) {
            return offset + (ns_of_day - start) / step_ns();
        }
        offset += Step{w.minutes()} * steps_per_minute();
    }
    return std::nullopt;
}

std::optional<Step> SessionCalendar::first_step_of_minute(int minute_of_day) const noexcept {
    return step_at(minute_of_day * kNsPerMinute);
}

}  // namespace lobsim
