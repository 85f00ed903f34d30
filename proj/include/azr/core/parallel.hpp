#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace azr {

/// Calls fn(i) for i in [0, count) on up to `width` threads. Work is handed
/// out in index order; with width 1 everything runs on the calling thread in
/// order. The first exception thrown by any call is rethrown after all
/// workers finish.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t width, Fn&& fn) {
  if (count == 0) return;
  width = std::clamp<std::size_t>(width, 1, count);
  if (width == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    threads.reserve(width - 1);
    for (std::size_t t = 1; t < width; ++t) threads.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace azr
