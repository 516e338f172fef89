#pragma once

#include <cstddef>
#include <functional>

namespace spca
{

// Worker count: SPCA_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, count). Each index writes only its own output
// slot, so results do not depend on scheduling. The first exception thrown
// by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace spca
