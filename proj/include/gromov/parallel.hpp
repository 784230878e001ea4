#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace gromov {

/// Worker count: GROMOV_PARAM_THREADS if set (>= 1), else the hardware count.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over worker_count() threads. The exception
/// of the lowest failing index is rethrown, so failures are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gromov
