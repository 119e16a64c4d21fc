#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace torsionlab {

// Process-wide worker count used by per-point kernels. 0 means "all cores".
inline int& thread_setting() {
  static int n = [] {
    if (const char* env = std::getenv("TORSIONLAB_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 0;
  }();
  return n;
}

inline void set_threads(int n) { thread_setting() = n; }

inline int thread_count() {
  int n = thread_setting();
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return n;
}

// Static-chunked parallel loop. Each index is visited exactly once; callers write
// into preallocated slots so results never depend on the worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(m);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

} // namespace torsionlab
