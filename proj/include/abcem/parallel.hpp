#pragma once

#include <cstddef>
#include <functional>

namespace abcem {

// Runs fn(0..count-1) across a small thread pool. Callers own any output
// slots, indexed by the argument, so results are deterministic regardless
// of scheduling. The first exception is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace abcem
