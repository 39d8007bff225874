#pragma once

#include <cstddef>
#include <functional>

namespace icesim {

/// Worker count from ICESIM_THREADS (default 1).
int thread_count();

/// Runs body(i) for i in [0, n) on thread_count() workers with a static partition.
/// Each index is written by exactly one worker, so results do not depend on the
/// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace icesim
