#pragma once

#include <cstdint>
#include <limits>

#include "lobsim/core/types.hpp"

namespace lobsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a named sub-stream. Order-independent: the child depends
/// only on (parent, tag).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
    return mix64(parent ^ mix64(tag ^ 0x5851f42d4c957f2dULL));
}

/// Small SplitMix64 generator satisfying UniformRandomBitGenerator, so the
/// <random> distributions work on top of it. Cheap to construct, which lets
/// agents restart a fresh stream every step (see step_stream).
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n); n must be positive.
    std::uint64_t index(std::uint64_t n) noexcept;

    double normal();
    double exponential(double rate);

private:
    std::uint64_t state_;
};

/// Stream for one agent at one step. Restarting per step keeps paired runs
/// in lock-step even when a state-dependent number of draws was consumed.
inline RandomStream step_stream(std::uint64_t agent_seed, Step step) noexcept {
    return RandomStream(derive_seed(agent_seed, static_cast<std::uint64_t>(step)));
}

/// Every seed one simulation run needs. A baseline and its counterfactual
/// share one SeedSet.
struct SeedSet {
    std::uint64_t master = 0;
    std::uint64_t run_index = 0;

    std::uint64_t run_seed() const noexcept { return derive_seed(master, run_index); }
    std::uint64_t agent(std::size_t agent_index) const noexcept {
        return derive_seed(run_seed(), 0x1000 + agent_index);
    }
    std::uint64_t fundamental() const noexcept { return derive_seed(run_seed(), 0xF0); }
    std::uint64_t book_seeding() const noexcept { return derive_seed(run_seed(), 0xB0); }
    std::uint64_t cancellation() const noexcept { return derive_seed(run_seed(), 0xC0); }

    static SeedSet for_run(std::uint64_t master, std::uint64_t run) noexcept { return {master, run}; }
};

}  // namespace lobsim
