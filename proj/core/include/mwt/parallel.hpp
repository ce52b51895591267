#pragma once

#include <functional>

namespace mwt {

/// Worker cap for the grid loops. Defaults to the hardware concurrency
/// (at most 8) and can be lowered or raised through the TOOL_THREADS
/// environment variable; set_max_threads overrides both.
int max_threads();
void set_max_threads(int n);

/// Runs fn(i) for i in [begin, end) on up to max_threads() workers with a
/// static block partition. Each index is processed exactly once and workers
/// share no state, so results are identical to the serial loop.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace mwt
