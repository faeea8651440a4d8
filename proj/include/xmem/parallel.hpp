#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xmem {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Index i always
/// writes its own output slot, so results do not depend on the thread count.
/// The first exception thrown by any worker is rethrown.
template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace xmem
