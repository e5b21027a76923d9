#pragma once

#include <cstddef>
#include <functional>

namespace qkinetic {

struct ExecutionOptions {
  unsigned threads = 1;
};

/// Resolves a requested thread count: 0 means "use QKINETIC_THREADS, else
/// hardware concurrency".
unsigned resolve_thread_count(unsigned requested);

/// Runs body(begin, end) over contiguous static chunks of [0, n). Chunk
/// boundaries depend only on n and the thread count, and each index is
/// visited by exactly one chunk.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace qkinetic
