#pragma once

#include <cstddef>
#include <functional>

namespace lobsim {

/// Worker count for a requested cap: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested) noexcept;

/// Calls fn(i) for every i in [0, n) on up to `threads` workers. Each index
/// runs exactly once; results must be written by index so the outcome does
/// not depend on scheduling. The first exception is rethrown after all
/// workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lobsim
