#pragma once

#include <cstddef>
#include <functional>

namespace driftlab {

// Worker count: DRIFTLAB_THREADS env var if set (>=1), else hardware concurrency.
int max_threads();

// Runs fn(chunk_index, begin, end) over [0,n) split into fixed-size chunks.
// Chunk boundaries depend only on n and grain, never on the worker count, so
// per-chunk partial results folded in chunk order give identical bytes for
// any DRIFTLAB_THREADS setting.
void parallel_chunks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

std::size_t chunk_count(std::size_t n, std::size_t grain);

}  // namespace driftlab
