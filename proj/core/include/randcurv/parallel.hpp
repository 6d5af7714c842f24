#pragma once

#include <cstddef>
#include <functional>

namespace randcurv {

/// Number of draws per scheduling unit. Work is always cut at multiples of this
/// size, independent of the worker count.
inline constexpr std::size_t kDrawBlock = 64;

/// Calls fn(begin, end) for every block [b·block, min((b+1)·block, count)).
/// Blocks are handed to `workers` threads (0 = hardware concurrency); fn must
/// only write to per-index output slots. The first exception thrown by any
/// block is rethrown after all threads finish.
void run_blocks(std::size_t count, std::size_t block, unsigned workers,
                const std::function<void(std::size_t, std::size_t)>& fn);

unsigned resolve_workers(unsigned requested);

}  // namespace randcurv
