#pragma once

#include <cstddef>
#include <functional>

namespace limase {

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). The first exception thrown by any task is rethrown after all
// workers join. Callers must make each fn(i) independent of scheduling.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

std::size_t resolve_thread_count(std::size_t requested);

}  // namespace limase
