#pragma once

// Angular-momentum algebra for collections of spin-1/2 particles.
//
// All spin labels are carried as doubled integers (HalfInt) so that integer
// and half-integer quantum numbers compare exactly. Clebsch-Gordan
// coefficients are evaluated with the Racah formula in exact rational
// arithmetic and only converted to floating point at the end.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "dirhide/errors.hpp"

namespace dirhide::angmom {

namespace mp = boost::multiprecision;

/// Largest number of spins for which dense 2^N objects are materialized.
inline constexpr int kDenseLimit = 12;

class HalfInt {
 public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  static constexpr HalfInt integer(int value) { return HalfInt(2 * value); }
  static constexpr HalfInt half(int numerator) { return HalfInt(numerator); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }

  friend constexpr bool operator==(HalfInt, HalfInt) = default;
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

inline constexpr HalfInt kHalf = HalfInt::from_twice(1);

/// A copy of the spin-j irrep inside (C^2)^{⊗N}; alpha runs over 1..n_j.
struct IrrepLabel {
  HalfInt j;
  int alpha = 1;
  friend constexpr auto operator<=>(const IrrepLabel&, const IrrepLabel&) = default;
};

/// True when |m| <= j and j - m is an integer.
constexpr bool valid_projection(HalfInt j, HalfInt m) {
  return j.twice() >= 0 && m.twice() >= -j.twice() && m.twice() <= j.twice() &&
         (j.twice() - m.twice()) % 2 == 0;
}

/// Position of m inside a block stored as m = -j, ..., j.
constexpr int projection_index(HalfInt j, HalfInt m) {
  return (m.twice() + j.twice()) / 2;
}

inline HalfInt projection_at(HalfInt j, int index) {
  return HalfInt::from_twice(2 * index - j.twice());
}

inline int block_size(HalfInt j) { return j.twice() + 1; }

inline void check_spin_label(int n_spins, HalfInt j) {
  if (n_spins < 1) throw DomainError("number of spins must be positive");
  if (j.twice() < 0 || j.twice() > n_spins || (n_spins - j.twice()) % 2 != 0) {
    throw DomainError("spin j=" + j.str() + " does not occur for N=" +
                      std::to_string(n_spins) + " spin-1/2 particles");
  }
}

/// Total-spin labels of N spins, from N/2 down to 0 or 1/2.
inline std::vector<HalfInt> spin_labels(int n_spins) {
  if (n_spins < 1) throw DomainError("number of spins must be positive");
  std::vector<HalfInt> out;
  for (int t = n_spins; t >= 0; t -= 2) out.push_back(HalfInt::from_twice(t));
  return out;
}

namespace detail {

inline constexpr int kFactorialTable = 1024;

inline const std::vector<mp::cpp_int>& factorial_table() {
  static const std::vector<mp::cpp_int> table = [] {
    std::vector<mp::cpp_int> t(kFactorialTable + 1);
    t[0] = 1;
    for (int i = 1; i <= kFactorialTable; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

inline mp::cpp_int factorial(int n) {
  if (n < 0) throw DomainError("negative factorial argument");
  if (n <= kFactorialTable) return factorial_table()[n];
  mp::cpp_int r = factorial_table()[kFactorialTable];
  for (int i = kFactorialTable + 1; i <= n; ++i) r *= i;
  return r;
}

inline mp::cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  mp::cpp_int r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline double to_double(const mp::cpp_rational& q) {
  using wide = mp::cpp_bin_float_50;
  const wide v = wide(mp::numerator(q)) / wide(mp::denominator(q));
  return v.convert_to<double>();
}

}  // namespace detail

/// Exact multiplicity n_j of spin j in N spin-1/2 particles:
/// C(N, N/2-j) - C(N, N/2-j-1).
inline mp::cpp_int multiplicity_exact(int n_spins, HalfInt j) {
  check_spin_label(n_spins, j);
  const int k = (n_spins - j.twice()) / 2;
  return detail::binomial(n_spins, k) - detail::binomial(n_spins, k - 1);
}

inline std::uint64_t multiplicity(int n_spins, HalfInt j) {
  const mp::cpp_int v = multiplicity_exact(n_spins, j);
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw ResourceError("multiplicity exceeds 64-bit range; use multiplicity_real");
  }
  return v.convert_to<std::uint64_t>();
}

/// Multiplicity as a double (saturates to +inf beyond double range).
inline double multiplicity_real(int n_spins, HalfInt j) {
  return mp::cpp_bin_float_50(multiplicity_exact(n_spins, j)).convert_to<double>();
}

/// Signed Clebsch-Gordan coefficient in exact form: value = sign * sqrt(square).
struct ExactCoefficient {
  int sign = 0;
  mp::cpp_rational square;

  double value() const {
    if (sign == 0) return 0.0;
    return sign * std::sqrt(detail::to_double(square));
  }
};

/// <j1 m1; j2 m2 | j m> with Condon-Shortley phases, exactly.
/// Non-physical (j, m) pairs throw; couplings forbidden by the triangle rule or
/// by m1 + m2 != m give zero.
inline ExactCoefficient clebsch_gordan_exact(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                                             HalfInt j, HalfInt m) {
  if (!valid_projection(j1, m1) || !valid_projection(j2, m2) || !valid_projection(j, m)) {
    throw DomainError("invalid angular momentum label in Clebsch-Gordan coefficient");
  }
  ExactCoefficient out;
  if (m1 + m2 != m) return out;
  const int t1 = j1.twice(), t2 = j2.twice(), t = j.twice();
  if (t < std::abs(t1 - t2) || t > t1 + t2 || (t1 + t2 + t) % 2 != 0) return out;

  // Integer combinations entering the Racah formula.
  const int a = (t1 + t2 - t) / 2;
  const int b = (t1 - t2 + t) / 2;
  const int c = (-t1 + t2 + t) / 2;
  const int d = (t1 + t2 + t) / 2 + 1;
  const int j1pm1 = (t1 + m1.twice()) / 2, j1mm1 = (t1 - m1.twice()) / 2;
  const int j2pm2 = (t2 + m2.twice()) / 2, j2mm2 = (t2 - m2.twice()) / 2;
  const int jpm = (t + m.twice()) / 2, jmm = (t - m.twice()) / 2;
  const int e = (t - t2 + m1.twice()) / 2;  // j - j2 + m1
  const int f = (t - t1 - m2.twice()) / 2;  // j - j1 - m2

  using detail::factorial;
  mp::cpp_rational prefactor(mp::cpp_int(t + 1) * factorial(a) * factorial(b) * factorial(c),
                             factorial(d));
  prefactor *= factorial(j1pm1) * factorial(j1mm1) * factorial(j2pm2) * factorial(j2mm2) *
               factorial(jpm) * factorial(jmm);

  const int k_lo = std::max({0, -e, -f});
  const int k_hi = std::min({a, j1mm1, j2pm2});
  mp::cpp_rational sum = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const mp::cpp_int den = factorial(k) * factorial(a - k) * factorial(j1mm1 - k) *
                            factorial(j2pm2 - k) * factorial(e + k) * factorial(f + k);
    const mp::cpp_rational term(1, den);
    if (k % 2 == 0) sum += term; else sum -= term;
  }
  if (sum == 0) return out;
  out.sign = sum > 0 ? 1 : -1;
  out.square = prefactor * sum * sum;
  return out;
}

inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j,
                             HalfInt m) {
  return clebsch_gordan_exact(j1, m1, j2, m2, j, m).value();
}

/// Squared coefficient <j' m'; 1/2 ms | j m'+ms>^2 for adding one spin-1/2,
/// in closed form. Used on hot paths where j' reaches several hundred.
inline double spin_half_coupling_squared(HalfInt j_parent, HalfInt m_parent, HalfInt ms,
                                         HalfInt j) {
  if (!valid_projection(j_parent, m_parent) || std::abs(ms.twice()) != 1) {
    throw DomainError("invalid label in spin-1/2 coupling");
  }
  const HalfInt m = m_parent + ms;
  if (!valid_projection(j, m)) return 0.0;
  const double jp = j_parent.value();
  const double mm = m.value();
  const double den = 2.0 * jp + 1.0;
  if (j.twice() == j_parent.twice() + 1) {
    return ms.twice() > 0 ? (jp + mm + 0.5) / den : (jp - mm + 0.5) / den;
  }
  if (j.twice() == j_parent.twice() - 1) {
    return ms.twice() > 0 ? (jp - mm + 0.5) / den : (jp + mm + 0.5) / den;
  }
  return 0.0;
}

/// Wigner small-d matrix element d^j_{m_row, m_col}(beta) = <j m_row| exp(-i beta J_y) |j m_col>.
inline double wigner_small_d(HalfInt j, HalfInt m_row, HalfInt m_col, double beta) {
  if (!valid_projection(j, m_row) || !valid_projection(j, m_col)) {
    throw DomainError("invalid label in Wigner d-matrix");
  }
  const int jpmr = (j.twice() + m_row.twice()) / 2, jmmr = (j.twice() - m_row.twice()) / 2;
  const int jpmc = (j.twice() + m_col.twice()) / 2, jmmc = (j.twice() - m_col.twice()) / 2;
  const int diff = (m_row.twice() - m_col.twice()) / 2;  // m_row - m_col
  const long double cb = std::cos(0.5L * beta);
  const long double sb = std::sin(0.5L * beta);
  const auto lf = [](int n) { return std::lgamma(static_cast<long double>(n) + 1.0L); };
  const long double log_norm = 0.5L * (lf(jpmr) + lf(jmmr) + lf(jpmc) + lf(jmmc));

  const int s_lo = std::max(0, -diff);
  const int s_hi = std::min(jpmc, jmmr);
  long double sum = 0.0L;
  for (int s = s_lo; s <= s_hi; ++s) {
    const long double log_coef = log_norm - lf(jpmc - s) - lf(s) - lf(diff + s) - lf(jmmr - s);
    const int cos_power = j.twice() - diff - 2 * s;
    const int sin_power = diff + 2 * s;
    long double term = std::exp(log_coef) * std::pow(cb, cos_power) * std::pow(sb, sin_power);
    if ((diff + s) % 2 != 0) term = -term;
    sum += term;
  }
  return static_cast<double>(sum);
}

/// One vector |j, m, alpha> of the coupled basis, in product-basis amplitudes.
/// Qubit k of N is bit (N-1-k) of the index; bit value 0 means spin up.
struct CoupledVector {
  IrrepLabel irrep;
  HalfInt m;
  std::vector<double> amplitudes;
};

/// Coupled (Schur) basis of N spins built by adding spins one at a time.
/// Ordered by j descending, then alpha, then m descending. The multiplicity
/// index follows the coupling path: parents with larger intermediate spin
/// come first.
inline std::vector<CoupledVector> schur_basis(int n_spins, int dense_limit = kDenseLimit) {
  if (n_spins < 1) throw DomainError("number of spins must be positive");
  if (n_spins > dense_limit) {
    throw ResourceError("schur_basis: N=" + std::to_string(n_spins) +
                        " exceeds dense limit " + std::to_string(dense_limit));
  }
  const HalfInt up = kHalf, down = -kHalf;
  std::vector<CoupledVector> current{{{kHalf, 1}, up, {1.0, 0.0}},
                                     {{kHalf, 1}, down, {0.0, 1.0}}};
  for (int n = 2; n <= n_spins; ++n) {
    const std::size_t parent_dim = std::size_t{1} << (n - 1);
    // Locate parent vectors by (j', alpha', m').
    auto find_parent = [&](IrrepLabel label, HalfInt m) -> const CoupledVector* {
      for (const auto& v : current) {
        if (v.irrep == label && v.m == m) return &v;
      }
      return nullptr;
    };
    std::vector<IrrepLabel> parents;
    for (const auto& v : current) {
      if (parents.empty() || !(parents.back() == v.irrep)) parents.push_back(v.irrep);
    }
    std::vector<CoupledVector> next;
    for (HalfInt j : spin_labels(n)) {
      int alpha = 0;
      for (const IrrepLabel& parent : parents) {
        if (std::abs(parent.j.twice() - j.twice()) != 1) continue;
        ++alpha;
        for (int t = j.twice(); t >= -j.twice(); t -= 2) {
          const HalfInt m = HalfInt::from_twice(t);
          CoupledVector out{{j, alpha}, m, std::vector<double>(2 * parent_dim, 0.0)};
          for (HalfInt ms : {up, down}) {
            const HalfInt mp_ = m - ms;
            if (!valid_projection(parent.j, mp_)) continue;
            const double cg = clebsch_gordan(parent.j, mp_, kHalf, ms, j, m);
            if (cg == 0.0) continue;
            const CoupledVector* pv = find_parent(parent, mp_);
            const std::size_t bit = ms == up ? 0 : 1;
            for (std::size_t i = 0; i < parent_dim; ++i) {
              out.amplitudes[2 * i + bit] += cg * pv->amplitudes[i];
            }
          }
          next.push_back(std::move(out));
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace dirhide::angmom
