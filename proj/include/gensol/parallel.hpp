#pragma once

#include <functional>

namespace gensol {

/// Worker count: GENSOL_THREADS if set (>= 1), else the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into slot i so that the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace gensol
