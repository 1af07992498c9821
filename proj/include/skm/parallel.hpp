#pragma once

#include <functional>

namespace skm {

/// Runs fn(i) for i in [0, count) across up to `threads` workers. Work items
/// must write only to their own slots; reductions happen outside, in fixed
/// index order, so results never depend on the schedule. Small batches run
/// inline to avoid pool overhead.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Thread cap from the SKM_THREADS environment variable (default 1).
int env_thread_cap();

}  // namespace skm
