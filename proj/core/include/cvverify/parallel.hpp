#pragma once

#include <cstddef>
#include <functional>

namespace cvv {

/// Calls body(i) for every i in [0, count) using up to `workers` threads.
/// Indices are claimed dynamically; callers must write results by index so
/// the outcome does not depend on the worker count. The first exception
/// thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

/// Worker count to use when the caller passes 0.
int default_workers();

}  // namespace cvv
