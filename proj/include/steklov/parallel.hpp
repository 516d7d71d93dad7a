#pragma once

#include <cstddef>
#include <functional>

namespace steklov {

/// Worker count: STEKLOV_NUM_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n), splitting the range into contiguous chunks
/// over worker_count() threads. Each index is visited exactly once; results
/// written by index are deterministic regardless of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace steklov
