#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace n2d3 {

// Worker count for row-parallel maps. N2D3_THREADS wins when set (clamped to
// [1,64]); otherwise hardware concurrency. Parallelism in this library is
// restricted to independent-row maps, so results are bit-identical for every
// thread count by construction.
inline int thread_count() {
  static const int n = [] {
    if (const char* env = std::getenv("N2D3_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<int>(std::min<long>(v, 64));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
  }();
  return n;
}

// fn(row) must touch only state owned by that row.
template <typename Fn>
void parallel_rows(int rows, Fn&& fn, int threads = thread_count()) {
  threads = std::clamp(threads, 1, rows > 0 ? rows : 1);
  if (threads == 1 || rows < 2) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(rows) * t / threads);
    const int hi =
        static_cast<int>(static_cast<long long>(rows) * (t + 1) / threads);
    pool.emplace_back([lo, hi, &fn] {
      for (int r = lo; r < hi; ++r) fn(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace n2d3
