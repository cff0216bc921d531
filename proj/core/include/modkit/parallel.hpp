#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace modkit {

/// Runs jobs 0..n_jobs-1 on up to n_threads workers. Jobs must write only
/// into their own pre-allocated output slots; the schedule is then
/// unobservable and results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n_jobs, unsigned n_threads, Fn&& fn) {
  if (n_jobs == 0) return;
  if (n_threads <= 1 || n_jobs == 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) fn(i);
    return;
  }

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(n_threads, n_jobs));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_jobs || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (...) {
        failed.store(true, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace modkit
