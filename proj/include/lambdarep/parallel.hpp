#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lambdarep/linalg.hpp"

namespace lambdarep {

/// Worker count from LAMBDAREP_WORKERS, else the hardware concurrency (at least 1).
int worker_count();

/// Process-wide override of worker_count(); 0 restores the default.
void set_worker_count(int n);

/// Runs body(i) for i in [0, n) on a pool of worker_count() threads. Each index
/// is processed exactly once; callers write to slot i so results do not depend
/// on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation, independent of thread count.
double pairwise_sum(std::span<const double> values);
Vector pairwise_sum(std::span<const Vector> values);

}  // namespace lambdarep
