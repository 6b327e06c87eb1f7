#pragma once

#include <cstddef>
#include <functional>

namespace peakon {

/// Worker count for sweeps: PEAKON_LAB_THREADS if set and positive, else the
/// hardware concurrency (at least 1).
std::size_t sweep_threads();

/// Calls body(i) for i in [0, count) on up to sweep_threads() threads.
/// Indices are split into contiguous blocks; callers write results to slot i,
/// so the outcome does not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace peakon
