#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace circulaw {

/// Number of workers to use: `requested` if nonzero, otherwise the hardware
/// concurrency. Always capped by the CIRCULAW_THREADS environment variable.
std::size_t worker_count(std::size_t requested = 0);

/// Runs body(i) for i in [0, count) on `threads` workers. Each index runs
/// exactly once; callers write results into slot i, so the outcome does not
/// depend on scheduling. If several bodies throw, the exception of the
/// lowest index is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace circulaw
