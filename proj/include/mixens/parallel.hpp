#pragma once

#include <cstddef>
#include <functional>

namespace mixens {

/// Runs fn(0..n-1) on up to `threads` worker threads (0 = hardware
/// concurrency). Each index runs exactly once; callers write results into
/// per-index slots, so output never depends on scheduling. If any call throws,
/// the exception of the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace mixens
