#pragma once

#include <cstddef>
#include <functional>

namespace castro {

// Resolves a requested worker count; 0 means one per hardware thread.
unsigned resolve_threads(unsigned requested);

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace castro
