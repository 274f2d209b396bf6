#ifndef ORIGAMI_PARALLEL_HPP
#define ORIGAMI_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace origami {

// Worker cap: ORIGAMI_SIM_THREADS when set (>=1), else the hardware
// concurrency.
unsigned worker_limit();

// Runs fn(0..n-1) on up to worker_limit() threads. Results must be
// written to per-index slots; the caller merges in deterministic order.
// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace origami

#endif
