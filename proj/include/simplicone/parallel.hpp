#pragma once

#include <cstddef>
#include <functional>

namespace simplicone {

// Worker count from SIMPLICONE_THREADS; 1 when unset or invalid.
unsigned worker_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers, each taking a
// contiguous block of indices. Exceptions from workers are rethrown (first
// by index order) after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace simplicone
