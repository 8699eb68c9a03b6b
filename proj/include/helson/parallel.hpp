#pragma once

#include <cstddef>
#include <functional>

namespace helson {

/// Worker count from HELSON_THREADS (default 1, clamped to [1, 256]).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Each index is
/// processed exactly once; callers must write results into per-index slots so
/// the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Sums values by a fixed pairwise tree over the index order.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace helson
