#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace spinlab {

// Worker cap: SPINLAB_THREADS if set and positive, otherwise hardware
// concurrency. Read once per call so tests can vary the environment.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("SPINLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1u;
}

// Blocking parallel loop over [begin, end). Body must be safe to run
// concurrently on distinct indices; iteration order is unspecified.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& body) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  unsigned workers = thread_budget();
  if (workers <= 1 || count == 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  if (workers > count) workers = static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      // Contiguous block split keeps cache behaviour predictable.
      const std::size_t lo = begin + count * w / workers;
      const std::size_t hi = begin + count * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace spinlab
