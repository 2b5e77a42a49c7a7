#pragma once

#include <cstddef>
#include <functional>

namespace landau {

/// Worker count: LANDAU_THREADS if set (clamped to >= 1), else hardware concurrency.
int worker_count();

/// Static block partition of [0, n) over workers. fn(index, worker_id).
/// Work items must write disjoint state; results are independent of the
/// worker count, so trajectories stay bit-identical across machines.
void parallel_for(std::size_t n, const std::function<void(std::size_t, int)>& fn);

}  // namespace landau
