#pragma once

// Counter-based random streams (Philox4x32-10). A stream is addressed by
// (seed, domain, index); the same address always yields the same sequence,
// so per-shot streams make Monte Carlo results independent of scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

#include "dirhide/errors.hpp"

namespace dirhide::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kMul0 = 0xD2511F53U;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

constexpr Counter philox4x32_10(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kWeyl0;
      key[1] += detail::kWeyl1;
    }
    std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
    detail::mulhilo(detail::kMul0, ctr[0], hi0, lo0);
    detail::mulhilo(detail::kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Sequential draws from the Philox block sequence of one (seed, domain, index).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint32_t domain, std::uint64_t index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), domain, 0U} {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      block_ = philox4x32_10(ctr_, key_);
      ++ctr_[3];
      pos_ = 0;
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Index in [0, n).
  std::uint32_t below(std::uint32_t n) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n) {
      const std::uint32_t threshold = (0U - n) % n;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  /// Number of successes in n Bernoulli(p) trials.
  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  /// Uniformly distributed unit vector.
  Eigen::Vector3d unit_vector() {
    const double z = 2.0 * uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
  }

 private:
  Key key_;
  Counter ctr_;
  Counter block_{};
  int pos_ = 4;
};

/// Inverse CDF of Beta(1, b): 1 - u^{1/b}.
inline double beta_one_b(double u, double b) { return 1.0 - std::pow(u, 1.0 / b); }

/// Inverse CDF of Beta(a, 1): u^{1/a}.
inline double beta_a_one(double u, double a) { return std::pow(u, 1.0 / a); }

/// Inverse CDF of Beta(2, b), whose CDF is 1 - (1-c)^b (1 + b c).
/// Safeguarded Newton iteration on [0, 1].
inline double beta_two_b(double u, double b) {
  if (b <= 0.0) throw DomainError("beta_two_b needs b > 0");
  const auto cdf = [b](double c) { return 1.0 - std::pow(1.0 - c, b) * (1.0 + b * c); };
  const auto pdf = [b](double c) { return b * (b + 1.0) * c * std::pow(1.0 - c, b - 1.0); };
  double lo = 0.0, hi = 1.0;
  double c = std::min(0.5, 2.0 / (b + 2.0));
  for (int it = 0; it < 200; ++it) {
    const double g = cdf(c) - u;
    if (g > 0.0) hi = c; else lo = c;
    const double d = pdf(c);
    double next = d > 0.0 ? c - g / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - c) <= 1e-15 * std::max(1.0, c) || hi - lo < 1e-16) return next;
    c = next;
  }
  return c;
}

}  // namespace dirhide::rng
