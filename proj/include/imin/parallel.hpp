#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace imin {

/// 0 means "all hardware threads".
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Splits [0, count) into contiguous blocks, one per worker, and calls
/// fn(worker, begin, end) for each. Runs inline with a single worker.
/// Callers must combine per-worker results in worker order (or with an
/// order-insensitive reduction) to stay independent of the thread count.
template <class Fn>
void parallel_blocks(std::size_t threads, std::size_t count, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(resolve_threads(threads), count));
  auto bounds = [&](std::size_t w) { return count * w / workers; };
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          fn(w, bounds(w), bounds(w + 1));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace imin
