#pragma once

#include <cstddef>
#include <functional>

namespace swmsl {

/// Worker count: SWMSL_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads with a static
/// chunk partition. Bodies must only write to their own index's slots;
/// reductions stay serial so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace swmsl
