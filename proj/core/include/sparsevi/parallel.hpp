#pragma once

// Chunked map-reduce over an index range [0, n).
//
// Deterministic mode fixes the reduction tree by chunk index alone: chunks
// are folded into a binary-counter stack in order, so the result is
// bit-identical for any thread count. The default mode lets each worker
// accumulate whichever chunks it claims, which reassociates the sums.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "sparsevi/counters.hpp"

namespace sparsevi {

struct ParallelOptions {
  int threads = 1;
  bool deterministic = true;
  std::size_t chunk_size = 2048;
};

namespace detail {

// Runs fn(i) for i in [0, count) on up to `threads` threads, then folds the
// workers' counters into the caller's. The first exception is rethrown.
template <class Fn>
void run_indexed(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<OpCounters> worker_counts(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const OpCounters before = thread_counters();
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i, w);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
      worker_counts[w] = thread_counters() - before;
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& c : worker_counts) thread_counters() += c;
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Computes merge-reduction of chunk(begin, end) over [0, n). `merge(a, b)`
/// must add b into a. Returns `identity` for n == 0.
template <class T, class Chunk, class Merge>
T parallel_reduce(std::size_t n, const ParallelOptions& opts, const T& identity, Chunk&& chunk,
                  Merge&& merge) {
  if (n == 0) return identity;
  const std::size_t chunk_size = std::max<std::size_t>(opts.chunk_size, 1);
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  auto range_of = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    return std::pair{begin, std::min(n, begin + chunk_size)};
  };

  if (opts.deterministic) {
    // Binary-counter stack: entry i holds the sum of a complete subtree of
    // 2^level[i] consecutive chunks.
    std::vector<std::pair<T, int>> stack;
    auto push = [&](T value) {
      int level = 0;
      while (!stack.empty() && stack.back().second == level) {
        merge(stack.back().first, value);
        value = std::move(stack.back().first);
        stack.pop_back();
        ++level;
      }
      stack.emplace_back(std::move(value), level);
    };
    const std::size_t wave = static_cast<std::size_t>(std::max(opts.threads, 1));
    for (std::size_t first = 0; first < n_chunks; first += wave) {
      const std::size_t count = std::min(wave, n_chunks - first);
      std::vector<std::optional<T>> results(count);
      detail::run_indexed(count, opts.threads, [&](std::size_t i, std::size_t) {
        const auto [b, e] = range_of(first + i);
        results[i].emplace(chunk(b, e));
      });
      for (auto& r : results) push(std::move(*r));
    }
    T total = std::move(stack.back().first);
    for (std::size_t i = stack.size() - 1; i-- > 0;) {
      merge(stack[i].first, total);
      total = std::move(stack[i].first);
    }
    return total;
  }

  const std::size_t workers =
      std::min<std::size_t>(n_chunks, static_cast<std::size_t>(std::max(opts.threads, 1)));
  std::vector<std::optional<T>> partial(workers);
  detail::run_indexed(n_chunks, opts.threads, [&](std::size_t c, std::size_t w) {
    const auto [b, e] = range_of(c);
    T value = chunk(b, e);
    if (partial[w]) {
      merge(*partial[w], value);
    } else {
      partial[w].emplace(std::move(value));
    }
  });
  T total = identity;
  for (auto& p : partial) {
    if (p) merge(total, *p);
  }
  return total;
}

/// Runs fn(begin, end) over chunks of [0, n) in parallel with no reduction.
template <class Fn>
void parallel_for_chunks(std::size_t n, const ParallelOptions& opts, Fn&& fn) {
  if (n == 0) return;
  const std::size_t chunk_size = std::max<std::size_t>(opts.chunk_size, 1);
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  detail::run_indexed(n_chunks, opts.threads, [&](std::size_t c, std::size_t) {
    const std::size_t begin = c * chunk_size;
    fn(begin, std::min(n, begin + chunk_size));
  });
}

}  // namespace sparsevi
