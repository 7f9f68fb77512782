#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dirhide::parallel {

/// Runs fn(begin, end) over fixed-size chunks of [0, total) on up to
/// `threads` workers and returns the chunk results in chunk order. Chunk
/// boundaries depend only on `total` and `chunk`, so reducing the returned
/// vector front to back gives the same bits for any thread count.
template <typename Fn>
auto map_chunks(std::uint64_t total, std::uint64_t chunk, int threads, Fn fn)
    -> std::vector<decltype(fn(std::uint64_t{}, std::uint64_t{}))> {
  using Result = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  chunk = std::max<std::uint64_t>(chunk, 1);
  const std::uint64_t n_chunks = (total + chunk - 1) / chunk;
  std::vector<Result> results(n_chunks);
  if (n_chunks == 0) return results;

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        const std::uint64_t begin = c * chunk;
        results[c] = fn(begin, std::min(total, begin + chunk));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
        return;
      }
    }
  };

  const int n_workers = static_cast<int>(std::min<std::uint64_t>(std::max(threads, 1), n_chunks));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

/// Running mean / variance (Welford) with a fixed-order merge (Chan et al.).
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count) + static_cast<double>(o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / n;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }

  double sample_variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

  /// Standard error of the mean: sample standard deviation / sqrt(count).
  double std_error() const {
    return count > 0 ? std::sqrt(sample_variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace dirhide::parallel
