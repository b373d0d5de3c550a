#pragma once

#include <cstddef>
#include <functional>

namespace rotor {

/// ROTOR_WORKERS if set and positive, otherwise the hardware concurrency.
int worker_count();

/// Calls fn(i) for i in [0, n) on up to `workers` threads (0 means worker_count()).
/// Each index runs exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace rotor
