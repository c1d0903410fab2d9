#pragma once

#include <functional>

namespace tilq {

/// Upper bound on worker threads used by library loops. Defaults to 1.
void set_thread_limit(int threads);
int thread_limit();

/// Runs body(i) for i in [begin, end). Work is split into contiguous blocks,
/// so results written per index are independent of the thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace tilq
