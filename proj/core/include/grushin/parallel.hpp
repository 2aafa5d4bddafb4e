#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace grushin {

// Runs f(i) for i in [0, n) on up to `threads` workers with static contiguous chunks.
// Callers write results into pre-sized slots, so reductions stay in index order.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t T = std::max<std::size_t>(1, std::min<std::size_t>(std::size_t(std::max(threads, 1)), n));
  if (T <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(T);
  for (std::size_t w = 0; w < T; ++w) {
    const std::size_t lo = n * w / T, hi = n * (w + 1) / T;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace grushin
