#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace treeprof {

/// Worker count: an explicit request wins, then TREEPROF_THREADS, then the
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on `threads` workers. Work items are
/// claimed dynamically; callers write results into slot i so the outcome does
/// not depend on scheduling. The first exception thrown by any item is
/// rethrown after all workers join.
template <class Body>
void parallel_for(std::int64_t count, unsigned threads, Body&& body) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  const auto n = static_cast<unsigned>(std::min<std::int64_t>(threads, count));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace treeprof
