#pragma once

// Two-stage covariant protocol M(m, x) = O(m) ⊗ E(m, x) at p = 1/2.
//
// Closed form of the mean alignment:
//
//   Delta = N1!/(2 N!) sum_x (-1)^f(x) (N-x)!/(N1-x)! { (N0+1)/(N+1) (N-2x)/(N+2)
//           - [ (N-2x) x N0(N0+1)/N1 + (N-2x-2)/(N-x-1) N (N0-1)^2
//               + (N-2x)(N1-x) N(N0+1)/N1 ] / (N(N-1)(N-x)) }
//
// where the last bracketed term is present only for x >= 1. Each x
// contributes independently of the others, so the guess function is
// optimized term by term.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dirhide/angmom.hpp"
#include "dirhide/errors.hpp"
#include "dirhide/protocol.hpp"
#include "dirhide/sampler.hpp"

namespace dirhide::semilocal {

namespace mp = boost::multiprecision;

/// Below this N the sum is evaluated in exact rational arithmetic.
inline constexpr int kExactBelow = 64;

namespace detail {

inline mp::cpp_rational exact_term(int n, int n0, int x) {
  using angmom::detail::factorial;
  const int n1 = n - n0;
  using Q = mp::cpp_rational;
  Q bracket = Q(n0 + 1, n + 1) * Q(n - 2 * x, n + 2);
  Q inner = Q(mp::cpp_int(n - 2 * x) * x * n0 * (n0 + 1), n1) +
            Q(n - 2 * x - 2, n - x - 1) * n * (n0 - 1) * (n0 - 1);
  if (x >= 1) inner += Q(mp::cpp_int(n - 2 * x) * (n1 - x) * n * (n0 + 1), n1);
  bracket -= inner / (mp::cpp_int(n) * (n - 1) * (n - x));
  const Q prefactor(factorial(n1) * factorial(n - x), 2 * factorial(n) * factorial(n1 - x));
  return prefactor * bracket;
}

inline long double log_space_term(int n, int n0, int x) {
  const int n1 = n - n0;
  const long double N = n, N0 = n0, N1 = n1, X = x;
  long double bracket = (N0 + 1) / (N + 1) * (N - 2 * X) / (N + 2);
  long double inner = (N - 2 * X) * X * N0 * (N0 + 1) / N1 +
                      (N - 2 * X - 2) / (N - X - 1) * N * (N0 - 1) * (N0 - 1);
  if (x >= 1) inner += (N - 2 * X) * (N1 - X) * N * (N0 + 1) / N1;
  bracket -= inner / (N * (N - 1) * (N - X));
  const auto lf = [](long double v) { return std::lgamma(v + 1.0L); };
  const long double log_pre = lf(N1) + lf(N - X) - lf(N) - lf(N1 - X) - std::log(2.0L);
  return std::exp(log_pre) * bracket;
}

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v; else comp_ += (v - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

}  // namespace detail

/// Signed contribution of each x to Delta when f(x) = 0, x = 0..N1.
inline std::vector<double> delta_terms(const SplitSpec& split) {
  split.validate();
  const int n = split.n_spins, n0 = split.first_stage, n1 = split.second_stage();
  std::vector<double> out(n1 + 1);
  for (int x = 0; x <= n1; ++x) {
    out[x] = n < kExactBelow ? angmom::detail::to_double(detail::exact_term(n, n0, x))
                             : static_cast<double>(detail::log_space_term(n, n0, x));
  }
  return out;
}

inline double semilocal_delta(const SplitSpec& split, const GuessFunction& guess) {
  split.validate();
  guess.check_matches(split);
  const int n = split.n_spins, n0 = split.first_stage, n1 = split.second_stage();
  if (n < kExactBelow) {
    mp::cpp_rational sum = 0;
    for (int x = 0; x <= n1; ++x) {
      const auto t = detail::exact_term(n, n0, x);
      if (guess(x)) sum -= t; else sum += t;
    }
    return angmom::detail::to_double(sum);
  }
  detail::CompensatedSum sum;
  for (int x = 0; x <= n1; ++x) {
    const long double t = detail::log_space_term(n, n0, x);
    sum.add(guess(x) ? -t : t);
  }
  return static_cast<double>(sum.value());
}

struct GuessResult {
  GuessFunction guess;
  double delta = 0.0;
};

/// Per-x optimal guess: f(x) = 0 exactly when the x-term is non-negative.
inline GuessResult optimize_guess(const SplitSpec& split) {
  split.validate();
  const int n = split.n_spins, n0 = split.first_stage, n1 = split.second_stage();
  std::vector<std::uint8_t> bits(n1 + 1);
  for (int x = 0; x <= n1; ++x) {
    const bool negative = n < kExactBelow ? detail::exact_term(n, n0, x) < 0
                                          : detail::log_space_term(n, n0, x) < 0.0L;
    bits[x] = negative ? 1 : 0;
  }
  GuessFunction f(std::move(bits));
  const double delta = semilocal_delta(split, f);
  return {std::move(f), delta};
}

struct SplitResult {
  int first_stage = 0;
  GuessFunction guess;
  double delta = 0.0;
};

/// Scans N0 = 2..N-1; ties keep the smallest N0.
inline SplitResult optimize_split(int n_spins) {
  if (n_spins < 4 || n_spins % 2 != 0) throw DomainError("optimize_split needs even N >= 4");
  SplitResult best;
  for (int n0 = 2; n0 <= n_spins - 1; ++n0) {
    auto r = optimize_guess(SplitSpec{n_spins, n0});
    if (best.first_stage == 0 || r.delta > best.delta) {
      best = {n0, std::move(r.guess), r.delta};
    }
  }
  return best;
}

/// Asymptotic maximum 1/4 + 1/(2N).
inline double asymptotic_delta(int n_spins) { return 0.25 + 0.5 / n_spins; }

struct SuccessEstimate {
  double p_success = 0.0;
  double std_error = 0.0;
  std::uint64_t shots = 0;
};

/// Monte Carlo probability that the orientation bit reads the tag correctly
/// (parallel branch kept, singlet branch reversed), equal priors.
inline SuccessEstimate discrimination_success(const SplitSpec& split, const GuessFunction& guess,
                                              std::uint64_t shots, std::uint64_t seed,
                                              int threads = 1) {
  if (shots == 0) throw DomainError("discrimination_success needs at least one shot");
  const auto tally = montecarlo::run_two_stage(split, guess, shots, seed, threads);
  return {tally.success.mean, tally.success.std_error(), shots};
}

}  // namespace dirhide::semilocal
