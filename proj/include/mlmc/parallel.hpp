#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mlmc {

/// Worker count: the override if set, else MLMC_THREADS, else hardware concurrency.
std::size_t worker_count();

/// 0 restores the environment-driven default.
void set_worker_count(std::size_t workers);

/// Runs body(i) for i in [0, n) over contiguous static chunks. Every index is
/// handled by exactly one worker, so results written per index do not depend
/// on the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mlmc
