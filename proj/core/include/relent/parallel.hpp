#pragma once

#include <cstddef>
#include <functional>

namespace relent {

/// Worker cap: RELENT_THREADS when set (>=1), else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, count). Chunked across workers; results must be
/// written to per-index slots so reductions stay deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace relent
