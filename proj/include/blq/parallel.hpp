#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace blq {

// Worker count: hardware concurrency capped by the BLQ_THREADS environment
// variable when it is set to a positive integer.
unsigned thread_count();

// Runs body(i) for i in [0, n); calls nested inside a body run inline. Each
// index is executed exactly once; callers write results into per-index slots
// so the outcome never depends on the number of threads or their scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Sum of term(i) over [0, n) accumulated in fixed-size chunks that are then
// combined in index order, giving bitwise-identical totals for any thread count.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                         std::size_t chunk = 4096);

}  // namespace blq
