#pragma once

#include <cstddef>
#include <functional>

namespace mrhet {

// Worker count: MR_HETERO_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
unsigned default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed
// out dynamically; callers write results into index-addressed slots so the
// outcome never depends on scheduling. The first exception thrown by a body
// is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace mrhet
