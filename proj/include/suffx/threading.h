// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_THREADING_H_
#define SUFFX_THREADING_H_

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace suffx {

// Runs fn(index, worker) for every index in [0, count). Work items are
// claimed from an atomic counter, so scheduling is dynamic, but callers must
// ensure results do not depend on assignment of items to workers (write into
// preallocated slots, keyed by index). worker is in [0, threads).
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t, int)>& fn) {
  if (count == 0) return;
  if (threads < 1) threads = 1;
  if (static_cast<std::size_t>(threads) > count) {
    threads = static_cast<int>(count);
  }
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) break;
        try {
          fn(i, w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) first_error = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace suffx

#endif  // SUFFX_THREADING_H_
