#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "vcop/common.hpp"

namespace vcop {

/// Worker-thread budget: VCOP_THREADS if set (>= 1), else hardware
/// concurrency. Parallel sections must produce bit-identical results to the
/// sequential computation, so only disjoint-write loops are parallelized.
inline int thread_budget() {
  if (const char* env = std::getenv("VCOP_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t < 1) throw ConfigError("VCOP_THREADS must be a positive integer");
      return t;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("VCOP_THREADS must be a positive integer");
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(begin, end) over a static partition of [0, n). Each chunk writes
/// disjoint outputs, so the result does not depend on the thread count.
template <typename F>
void parallel_chunks(int n, F&& f) {
  const int threads = std::min(thread_budget(), std::max(n, 1));
  if (threads <= 1 || n < 2) {
    f(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&f, begin, end] { f(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace vcop
