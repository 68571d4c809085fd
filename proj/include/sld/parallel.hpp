#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sld::par {

// Runs fn(i) for i in [0, n). Work items must write disjoint state; results are
// then independent of the worker count and of scheduling order.
inline void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t nw = std::min<size_t>(workers, n);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace sld::par
