#pragma once

#include <functional>

namespace perisurf {

/// Worker count: PERISURF_THREADS if set to a positive integer, else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. The first
/// exception thrown by any body is rethrown after all workers have joined.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace perisurf
