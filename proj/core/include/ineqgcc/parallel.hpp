#pragma once

#include <cstddef>
#include <functional>

namespace ineqgcc {

/// Worker count from INEQGCC_THREADS, else the hardware concurrency.
int default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; callers write results into slot i so the outcome
/// does not depend on scheduling. The exception thrown at the smallest index
/// is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ineqgcc
