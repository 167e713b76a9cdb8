#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gbgcn {

// Static contiguous chunks; each index is handled by exactly one worker, so
// results do not depend on the worker count as long as `fn` writes only to
// its own indices.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(threads > 1 ? threads : 1, n);
  if (workers <= 1 || n < 256) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

int default_threads();

}  // namespace gbgcn
