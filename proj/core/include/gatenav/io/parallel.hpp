#pragma once

#include <cstdint>
#include <functional>

namespace gatenav {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
// independent; with per-index rng substreams the output does not depend on
// the thread count. threads <= 1 runs inline.
void parallel_for(int64_t n, int threads, const std::function<void(int64_t)>& fn);

int hardware_threads();

}  // namespace gatenav
