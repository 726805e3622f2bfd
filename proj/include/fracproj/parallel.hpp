#pragma once

#include <cstddef>
#include <functional>

namespace fracproj {

/// Number of worker threads used by parallel loops; 0 selects the hardware
/// concurrency. Results never depend on this value.
void set_worker_count(unsigned count);
unsigned worker_count();

/// Calls body(i) for every i in [0, n). Exceptions are rethrown on the
/// calling thread (the one with the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracproj
