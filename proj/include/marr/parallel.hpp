#pragma once

#include <cstddef>
#include <functional>

namespace marr {

// Worker count from MARR_WORKERS, else hardware concurrency (at least 1).
unsigned default_workers();

// Runs body(i) for i in [0, n). Each index is independent; results must be
// written to per-index slots so output order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body,
                  unsigned workers = 0);

} // namespace marr
