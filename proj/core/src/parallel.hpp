#pragma once

#include <algorithm>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gri {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.  Indices are
/// dealt in contiguous blocks; every call writes only its own slot, so the
/// result never depends on the worker count.
inline void parallel_for(long count, int threads,
                         const std::function<void(long)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long>(threads, count));
  const long block = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const long begin = w * block;
    const long end = std::min(count, begin + block);
    pool.emplace_back([&, begin, end] {
      try {
        for (long i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gri
