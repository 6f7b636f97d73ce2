#pragma once

#include <cstddef>
#include <functional>

namespace cogverify {

/// Worker count: the override from set_thread_count, else COGVERIFY_THREADS,
/// else the hardware concurrency. Always at least 1.
unsigned thread_count();

/// 0 restores the environment/hardware default.
void set_thread_count(unsigned n);

/// Runs fn(begin, end) over contiguous chunks covering [0, n). Chunks are
/// fixed by n and the worker count only; callers that write disjoint slots get
/// results independent of scheduling. Nested calls run inline. The first
/// exception thrown by any chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 2048);

}  // namespace cogverify
