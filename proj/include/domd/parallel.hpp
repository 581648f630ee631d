#pragma once

#include <cstddef>
#include <functional>

namespace domd {

/// Runs body(i) for i in [0, count). With threads <= 1 the loop is serial;
/// otherwise indices are split into contiguous chunks, one per thread. Each
/// body call must only write to slot i, so results do not depend on the
/// thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Reads DOMD_THREADS; unset or unparsable means 0 (serial).
int threads_from_env();

}  // namespace domd
