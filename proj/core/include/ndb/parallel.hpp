#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ndb {

// Worker count for fan-out stages: NDB_WORKERS when set to a positive
// integer, otherwise hardware concurrency; never more than `tasks` and never
// zero.
inline std::size_t worker_count(std::size_t tasks) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("NDB_WORKERS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) n = static_cast<std::size_t>(parsed);
  }
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(tasks, 1));
}

// Runs fn(i) for every i in [0, n), fanned out over `workers` threads
// (0 = worker_count(n)). The first exception wins and is rethrown once every
// worker has drained; remaining work is abandoned. fn must be safe to run
// concurrently for distinct i.
template <typename Fn>
void parallel_for_index(std::size_t n, Fn&& fn, std::size_t workers = 0) {
  if (workers == 0) workers = worker_count(n);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr first;
  auto drain = [&]() noexcept {
    try {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        if (failed.load(std::memory_order_relaxed)) return;
        fn(i);
      }
    } catch (...) {
      failed.store(true, std::memory_order_relaxed);
      const std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (std::thread& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace ndb
