// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file parallel.hpp
/// \brief Minimal index-parallel loop for embarrassingly parallel k-sweeps.
///
/// Each task writes only to its own output slot, so results are bitwise
/// independent of the worker count.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace triweyl {

/// Run fn(i) for i in [0, n) on up to nthreads workers.  fn must only touch
/// state owned by index i.  The first exception thrown by any task is
/// rethrown on the calling thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, int nthreads, Fn&& fn) {
  if (n == 0) return;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = nthreads > 0 ? static_cast<std::size_t>(nthreads) : hw;
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace triweyl
