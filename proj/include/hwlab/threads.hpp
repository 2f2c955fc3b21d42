#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace hwlab {

// Parallelism cap. HW_LAB_THREADS=0 (or unset) means "use the hardware".
inline int thread_count() {
  static const int cached = [] {
    if (const char* env = std::getenv("HW_LAB_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
  }();
  return cached;
}

// Runs body(i) for i in [0, count). Work items must not touch shared
// mutable state except through their own slot; completion order is
// unspecified, so callers write results into preallocated storage.
template <class Body>
void parallel_for(int count, Body&& body) {
  if (count <= 0) return;
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          body(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hwlab
