#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace relayplan {

// Runs f(i) for i in [0, n). Work items must be independent and write only to
// their own output slot; callers aggregate in canonical index order afterward,
// which keeps results identical for any thread count.
template <typename F>
void parallel_for(int n, int threads, F&& f) {
  if (n <= 0) return;
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([w, n, threads, &f] {
      for (int i = w; i < n; i += threads) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace relayplan
