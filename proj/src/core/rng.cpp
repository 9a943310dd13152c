#include "lobsim/core/rng.hpp"

#include <cmath>
#include <random>

namespace lobsim {

__extension__ using u128 = unsigned __int128;

std::uint64_t RandomStream::index(std::uint64_t n) noexcept {
    // Multiply-shift; bias is below 2^-64 * n and irrelevant at our sizes.
    return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * n) >> 64);
}

double RandomStream::normal() {
    std::normal_distribution<double> dist;
    return dist(*this);
}

double RandomStream::exponential(double rate) {
    // 1 - u lies in (0, 1], so the log is finite.
    return -std::log1p(-uniform()) / rate;
}

}  // namespace lobsim
