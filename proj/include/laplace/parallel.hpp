#pragma once

#include <cstddef>
#include <functional>

namespace laplace {

// Worker cap from LAPLACE_CALC_THREADS (0 or unset = hardware concurrency).
std::size_t thread_cap();

// Runs fn(0..n-1) on up to thread_cap() workers. Slot-indexed writes keep
// results deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace laplace
