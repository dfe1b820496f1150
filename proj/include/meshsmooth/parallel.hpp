#pragma once

#include <thread>
#include <vector>

namespace meshsmooth {

/// Runs body(i) for i in [0, n). With threads > 1 the index range is split
/// into contiguous chunks, one per worker. Deterministic as long as body(i)
/// writes only to slot i.
template <class F>
inline void parallel_for(int n, int threads, F&& body) {
  if (threads <= 1 || n < 2 * threads) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int chunk = (n + threads - 1) / threads;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&body, begin, end] {
      for (int i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace meshsmooth
