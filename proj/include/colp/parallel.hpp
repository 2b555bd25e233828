#pragma once

#include <cstddef>
#include <functional>

namespace colp {

/// Worker cap: COLPNETS_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker threads. Each index must
/// write only to its own output slot; callers reduce afterwards in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace colp
