#pragma once

#include <cstddef>
#include <functional>

namespace windcast {

/// Worker count: hardware concurrency, capped by WINDCAST_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Work is
/// claimed dynamically; the first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace windcast
