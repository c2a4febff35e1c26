#pragma once

#include <cstddef>
#include <functional>

namespace flowlab {

/// Worker count: FLOWLAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned thread_count();

/// Calls body(k) for every k in [0, n), splitting the range into contiguous
/// blocks across workers. Results must be written to disjoint slots, so the
/// output order never depends on scheduling. If any call throws, the
/// exception from the smallest failing index is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace flowlab
