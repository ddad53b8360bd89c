#pragma once

#include <cstddef>
#include <functional>

namespace ttf {

/// Resolves 0 to the hardware thread count (at least 1).
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Callers write
/// results into per-index slots, so output never depends on the schedule. The
/// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace ttf
