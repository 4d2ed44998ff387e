#pragma once

#include <cstddef>
#include <functional>

namespace qcurv {

/// Worker count: hardware concurrency, capped by QCURV_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each
/// index is visited exactly once; the first exception thrown is rethrown
/// after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qcurv
