#pragma once

#include <functional>

namespace rssd {

// Worker count: RSSD_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Runs body(i) for i in [0, count). Work is split into contiguous chunks so
// results written by index are independent of the thread count. The first
// exception thrown by any worker is rethrown on the caller.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace rssd
