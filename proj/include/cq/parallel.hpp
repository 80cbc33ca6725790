#pragma once

#include <cstddef>
#include <functional>

namespace cq {

// Worker count: CQ_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n) across the pool; each index is touched once.
// Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cq
