#pragma once

#include <cstddef>
#include <functional>

namespace pw {

/// Worker count used by the library's parallel loops (default 1).
void set_num_threads(int n);
int num_threads();

/// Runs body(begin, end) over contiguous chunks of [0, count).
/// Chunk boundaries depend only on count and the thread count, and every index
/// is handled by exactly one call, so results never depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace pw
