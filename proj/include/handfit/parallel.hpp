#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace handfit {

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads, in
/// contiguous blocks. body must only write to state owned by index i.
/// The first exception thrown by any block is rethrown on the caller.
template <typename Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = n * w / workers; i < n * (w + 1) / workers; ++i) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace handfit
