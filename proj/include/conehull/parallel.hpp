#pragma once

#include <cstddef>
#include <functional>

namespace conehull {

/// Runs body(i) for i in [0, count) on `workers` threads (0 = hardware
/// concurrency). Indices are handed out dynamically; callers write results
/// into slot i so the outcome does not depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace conehull
