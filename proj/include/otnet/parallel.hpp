#pragma once

#include "otnet/types.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace otnet {

/// Process-wide worker-count knob; 0 means hardware concurrency.
void set_worker_count(int workers);
int worker_count();

/// Splits [0, count) into blocks of `block` items and evaluates fn(begin, end)
/// for each one, possibly on several threads. Partial results come back in
/// block order, so any reduction over them is independent of the number of
/// workers.
template <typename T, typename Fn>
std::vector<T> map_blocks(Index count, Index block, Fn&& fn, int workers = worker_count()) {
  const Index n_blocks = count <= 0 ? 0 : (count + block - 1) / block;
  std::vector<T> partial(static_cast<std::size_t>(n_blocks));
  auto run_block = [&](Index b) {
    const Index begin = b * block;
    partial[static_cast<std::size_t>(b)] = fn(begin, std::min(count, begin + block));
  };
  const int threads = static_cast<int>(std::min<Index>(std::max(workers, 1), n_blocks));
  if (threads <= 1) {
    for (Index b = 0; b < n_blocks; ++b) run_block(b);
    return partial;
  }

  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (Index b = next++; b < n_blocks; b = next++) {
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return partial;
}

}  // namespace otnet
