#pragma once

#include <array>
#include <cstddef>

namespace lobsim {

/// Per-minute arrival probabilities per step, indexed by minute of day.
/// alpha = limit orders per step, mu = market orders per step; the market
/// volume per minute drives intraday VWAP slicing.
struct RateProfile {
    static constexpr std::size_t kMinutes = 1440;

    std::array<double, kMinutes> alpha{};
    std::array<double, kMinutes> mu{};
    std::array<double, kMinutes> market_volume{};

    double alpha_at(int minute_of_day) const noexcept { return alpha[static_cast<std::size_t>(minute_of_day) % kMinutes]; }
    double mu_at(int minute_of_day) const noexcept { return mu[static_cast<std::size_t>(minute_of_day) % kMinutes]; }
    double volume_at(int minute_of_day) const noexcept {
        return market_volume[static_cast<std::size_t>(minute_of_day) % kMinutes];
    }
};

}  // namespace lobsim
