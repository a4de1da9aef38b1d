#pragma once

// Deterministic parallel map: body(k) writes only into slot k of a
// preallocated result array, so the reduction order (and therefore
// every output byte) is independent of the worker count.

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include "fsl/errors.hpp"

namespace fsl {

inline void parallel_for(int64_t n, int workers,
                         const std::function<void(int64_t)>& body) {
  require_input(workers >= 1, "workers must be >= 1");
  if (workers == 1 || n < 2) {
    for (int64_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  const int use = int(std::min<int64_t>(workers, n));
  pool.reserve(use);
  std::atomic<bool> failed{false};
  for (int w = 0; w < use; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t k = next.fetch_add(1);
        if (k >= n || failed.load()) break;
        try {
          body(k);
        } catch (...) {
          failed.store(true);
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  require_numeric(!failed.load(), "parallel_for: a worker task failed");
}

}  // namespace fsl
