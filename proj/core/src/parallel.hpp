#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace troenpy::detail {

// Runs fn(i) for i in [0, n). Each index is handled exactly once and results
// must be written to disjoint slots, so the outcome is identical at any
// thread count. threads == 0 means hardware concurrency.
template <typename Fn>
void parallel_for_index(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) {
      threads = 1;
    }
  }
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

}  // namespace troenpy::detail
