#pragma once

#include <cstddef>
#include <functional>

namespace tileopt {

// Worker count used by data-parallel loops; defaults to the hardware concurrency.
void set_thread_count(int threads);
int thread_count();

// Splits [0, n) into contiguous blocks, one per worker. Each block is processed
// serially, so per-index results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace tileopt
