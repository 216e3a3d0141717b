#pragma once

#include <algorithm>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrl::par {

enum class Mode { Serial, Parallel };

// Parallel when compiled with OpenMP, otherwise Serial.
Mode default_mode();

int max_threads();

// Runs fn(chunk, begin, end) over fixed-size chunks of [0, n). Chunk
// boundaries depend only on (n, chunk_size), never on the thread count, so a
// reduction that accumulates per chunk and combines the partials in chunk
// order gives bit-identical results in Serial and Parallel mode, for any
// number of threads. fn must not touch state shared across chunks.
template <class F>
void for_chunks(std::size_t n, std::size_t chunk_size, Mode mode, F&& fn) {
  if (n == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
#ifdef _OPENMP
  if (mode == Mode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
      const std::size_t b = static_cast<std::size_t>(c) * chunk_size;
      fn(static_cast<std::size_t>(c), b, std::min(n, b + chunk_size));
    }
    return;
  }
#else
  (void)mode;
#endif
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t b = c * chunk_size;
    fn(c, b, std::min(n, b + chunk_size));
  }
}

}  // namespace mrl::par
