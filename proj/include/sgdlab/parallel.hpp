#pragma once

#include <cstdint>
#include <functional>

namespace sgdlab {

// Worker cap from SGDLAB_THREADS (0 or unset = hardware concurrency).
// Affects speed only; callers must make results independent of scheduling.
int worker_count();

// Runs fn(i) for every i in [0, count) across workers. fn may only touch
// state owned by slot i. All indices are processed even after a failure;
// the lowest-index exception is rethrown once every worker has joined.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn);

}  // namespace sgdlab
