#pragma once

#include <cstddef>
#include <functional>

namespace nonlocal {

// Worker count for the embarrassingly parallel loops (strategy enumeration,
// see-saw restarts).  NONLOCAL_LAB_THREADS caps it; unset or invalid values
// fall back to the hardware count, itself capped at 8.
std::size_t worker_count();

// Runs fn(begin, end) over a partition of [0, n).  Results must be merged by
// the caller with an associative, order-independent reduction so the outcome
// does not depend on the partition.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn);

}  // namespace nonlocal
