#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace feketelab {

// Thread cap: FEKETELAB_THREADS if set, else hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("FEKETELAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(block) for block = 0..nblocks-1 on up to thread_budget() threads.
// Each block is processed by exactly one thread; the caller combines per-block
// results in block order, so outputs do not depend on the thread count.
template <class Fn>
void run_blocks(std::size_t nblocks, Fn&& fn) {
  if (nblocks == 0) return;
  std::size_t nthreads = static_cast<std::size_t>(thread_budget());
  if (nthreads > nblocks) nthreads = nblocks;
  if (nthreads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t b = t; b < nblocks; b += nthreads) fn(b);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace feketelab
