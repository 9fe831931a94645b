#pragma once

#include <cstddef>
#include <functional>

namespace lineloc {

/// Worker count used by parallel_for. 1 (the default) runs everything inline.
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, n). Work is split in contiguous chunks; each index
/// is computed exactly once, so per-slot output writes are race-free and the
/// result is identical at any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lineloc
