#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace pentest {

/// Calls fn(i) for i in [0, count) on up to `jobs` threads (strided). The
/// first exception thrown by any worker is rethrown after all have joined.
template <typename Fn>
void for_each_trial(long long count, int jobs, Fn&& fn) {
  if (count <= 0) return;
  const int workers = static_cast<int>(std::clamp<long long>(jobs, 1, count));
  if (workers == 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long long i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pentest
