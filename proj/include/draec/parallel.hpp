#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace draec {

// Worker count for data-parallel loops: DRAEC_WORKERS env var, else the
// hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("DRAEC_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {
inline thread_local bool in_parallel_region = false;
}

// Static block partition of [0, n) across workers. Work items must write to
// disjoint state; the assignment is a pure function of (n, workers), so
// results are identical for any worker count. Nested calls run serially.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = detail::in_parallel_region ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long>(n) * w / workers);
    const int end = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
    threads.emplace_back([begin, end, &fn] {
      detail::in_parallel_region = true;
      for (int i = begin; i < end; ++i) fn(i);
      detail::in_parallel_region = false;
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace draec
