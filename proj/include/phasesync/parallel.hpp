#pragma once

#include <cstddef>
#include <functional>

namespace phasesync {

// Worker count from PHASESYNC_THREADS (0 or unset = hardware concurrency).
std::size_t configured_threads();

// Runs body(k) for k in [0, count) on up to `threads` workers. Items are
// independent, so results never depend on the worker count. The first
// exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace phasesync
