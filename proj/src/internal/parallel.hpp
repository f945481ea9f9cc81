#pragma once

#include <cstddef>
#include <functional>

namespace jumpsl::internal {

/// Worker count: JUMPSL_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n). Results must be written by index; the
/// first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jumpsl::internal
