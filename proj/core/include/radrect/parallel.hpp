#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace radrect {

// Order-independent parallel loop; results must be written to per-index
// slots by the body.
inline void parallel_for(int n, const std::function<void(int)>& body,
                         int threads = 0) {
  if (threads <= 0) threads = int(std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(size_t(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace radrect
