#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace hflow {

/// Number of worker threads (HFLOW_THREADS env var, default: hardware).
int thread_count();

/// Static-chunk parallel loop over [0, n). Results must not depend on the
/// execution order; chunking is fixed so outputs are identical for any
/// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed pairwise-tree sum: block sums of 256 values combined in a binary
/// tree. Bit-identical across runs and thread counts.
double deterministic_sum(std::span<const double> v);

/// Pairwise-tree sum of f(i) for i in [0, n).
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& f);

}  // namespace hflow
