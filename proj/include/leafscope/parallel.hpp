#pragma once

#include <cstddef>
#include <functional>

namespace leafscope {

// Worker count: LEAFSCOPE_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Overrides the worker count for this process (0 restores the environment default).
void set_worker_count(int n);

// Runs body(i) for i in [0, n). Work is split into contiguous index blocks;
// callers write results by index, so output never depends on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace leafscope
