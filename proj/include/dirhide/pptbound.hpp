#pragma once

// Separability bound on discriminating the J and J-1 total-spin sectors.
//
// The symmetrized two-outcome POVM is Q_J = a 1_J + b 1_{J-1} + c 1_{j<J-1},
// Q_{J-1} = 1 - Q_J. Four spin-J/2 parties share |psi+>^13 |psi+>^24 with
// |psi+> = (|e0 e1> + |e1 e0>)/sqrt2 and |e_k> = |J/2, J/2-k>. Measuring Q on
// parties 12 must leave 34 separable, so both conditional states of 34 must
// have a positive partial transpose.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dirhide/angmom.hpp"
#include "dirhide/errors.hpp"

namespace dirhide::pptbound {

using angmom::HalfInt;

/// 2 - sqrt(5)/2.
inline const double kAsymptoticBound = 2.0 - std::sqrt(5.0) / 2.0;

struct PairParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  void validate() const {
    for (double v : {a, b, c}) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("pair parameters must lie in [0, 1]");
    }
  }

  PairParams complement() const { return {1.0 - a, 1.0 - b, 1.0 - c}; }
};

/// p_S = (1 + a - b)/2.
inline double success_probability(const PairParams& q) { return 0.5 * (1.0 + q.a - q.b); }

/// Restrictions of P_J, P_{J-1} and P_{<J-1} of two spin-J/2 systems to
/// span{|e_k e_l>}, index 2k + l.
struct EmbeddedPairGeometry {
  int big_j = 2;
  Eigen::Matrix4d top;
  Eigen::Matrix4d next;
  Eigen::Matrix4d rest;
};

inline EmbeddedPairGeometry embedded_pair_projectors(int big_j) {
  if (big_j < 2 || big_j % 2 != 0) throw DomainError("embedded pair needs an even J >= 2");
  const HalfInt s = HalfInt::integer(big_j / 2);
  const auto level = [s](int k) { return s - HalfInt::integer(k); };
  const auto block = [&](HalfInt total) {
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    for (int r = 0; r < 4; ++r) {
      for (int col = 0; col < 4; ++col) {
        const HalfInt m1 = level(r / 2), m2 = level(r % 2);
        const HalfInt n1 = level(col / 2), n2 = level(col % 2);
        if (m1 + m2 != n1 + n2) continue;
        const HalfInt m = m1 + m2;
        if (std::abs(m.twice()) > total.twice()) continue;
        g(r, col) = angmom::clebsch_gordan(s, m1, s, m2, total, m) *
                    angmom::clebsch_gordan(s, n1, s, n2, total, m);
      }
    }
    return g;
  };
  EmbeddedPairGeometry geo;
  geo.big_j = big_j;
  geo.top = block(HalfInt::integer(big_j));
  geo.next = block(HalfInt::integer(big_j - 1));
  geo.rest = Eigen::Matrix4d::Identity() - geo.top - geo.next;
  return geo;
}

struct ConditionalStates {
  Eigen::Matrix4d outcome_top;   // Q_J measured on 12
  Eigen::Matrix4d outcome_next;  // Q_{J-1} measured on 12
};

namespace detail {

using Matrix16d = Eigen::Matrix<double, 16, 16>;

/// tr_12[(Q (x) 1) |psi><psi|] on the 4-qubit embedding, party order 1234,
/// party 1 most significant.
inline Eigen::Matrix4d condition_on(const Eigen::Matrix4d& q) {
  Eigen::Matrix<double, 16, 1> psi = Eigen::Matrix<double, 16, 1>::Zero();
  const auto idx = [](int p1, int p2, int p3, int p4) { return 8 * p1 + 4 * p2 + 2 * p3 + p4; };
  for (int p1 = 0; p1 < 2; ++p1) {
    for (int p2 = 0; p2 < 2; ++p2) psi(idx(p1, p2, 1 - p1, 1 - p2)) = 0.5;
  }
  Matrix16d q12 = Matrix16d::Zero();
  for (int r = 0; r < 4; ++r) {
    for (int col = 0; col < 4; ++col) q12.block<4, 4>(4 * r, 4 * col) = q(r, col) * Eigen::Matrix4d::Identity();
  }
  const Matrix16d m = q12 * psi * psi.transpose();
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int t = 0; t < 4; ++t) out += m.block<4, 4>(4 * t, 4 * t);
  return out;
}

}  // namespace detail

inline ConditionalStates conditional_states(const EmbeddedPairGeometry& geo, const PairParams& q) {
  q.validate();
  const Eigen::Matrix4d qt = q.a * geo.top + q.b * geo.next + q.c * geo.rest;
  const Eigen::Matrix4d qn = Eigen::Matrix4d::Identity() - qt;
  return {detail::condition_on(qt), detail::condition_on(qn)};
}

/// Partial transpose on the second qubit (party 4).
inline Eigen::Matrix4d partial_transpose(const Eigen::Matrix4d& rho) {
  Eigen::Matrix4d out;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      for (int kp = 0; kp < 2; ++kp) {
        for (int lp = 0; lp < 2; ++lp) out(2 * k + l, 2 * kp + lp) = rho(2 * k + lp, 2 * kp + l);
      }
    }
  }
  return out;
}

inline double min_pt_eigenvalue(const Eigen::Matrix4d& rho) {
  const Eigen::Matrix4d pt = partial_transpose(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(0.5 * (pt + pt.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

/// Smallest partial-transpose eigenvalue over both outcomes.
inline double ppt_margin(const EmbeddedPairGeometry& geo, const PairParams& q) {
  const auto s = conditional_states(geo, q);
  return std::min(min_pt_eigenvalue(s.outcome_top), min_pt_eigenvalue(s.outcome_next));
}

inline bool ppt_feasible(const EmbeddedPairGeometry& geo, const PairParams& q, double tol) {
  return ppt_margin(geo, q) >= -tol;
}

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, PairParams best) : std::runtime_error(what), best_(best) {}
  const PairParams& best_feasible() const { return best_; }

 private:
  PairParams best_;
};

struct BoundResult {
  PairParams params;
  double p_success = 0.5;
};

inline constexpr int kGridPoints = 201;
inline constexpr double kPolishStep = 1e-9;

namespace detail {

inline bool in_box(const PairParams& q) {
  return q.a >= 0.0 && q.a <= 1.0 && q.b >= 0.0 && q.b <= 1.0 && q.c >= 0.0 && q.c <= 1.0;
}

/// Grid search for a feasible point with a - b = gap.
inline bool feasible_at_gap(const EmbeddedPairGeometry& geo, double gap, double tol, PairParams& found) {
  const int n = kGridPoints - 1;
  double best_margin = -1.0;
  bool ok = false;
  for (int i = 0; i <= n; ++i) {
    const double a = gap + (1.0 - gap) * i / n;
    const double b = std::max(0.0, a - gap);
    for (int k = 0; k <= n; ++k) {
      const PairParams q{a, b, static_cast<double>(k) / n};
      const double m = ppt_margin(geo, q);
      if (m >= -tol && m > best_margin) {
        best_margin = m;
        found = q;
        ok = true;
      }
    }
  }
  return ok;
}

/// Pattern search over the 26 neighbour directions maximizing a - b while
/// staying feasible; the step is halved down to kPolishStep.
inline PairParams polish(const EmbeddedPairGeometry& geo, PairParams q, double tol) {
  double h = 1.0 / (kGridPoints - 1);
  while (h >= kPolishStep) {
    bool moved = false;
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (da - db <= 0) continue;
          const PairParams t{q.a + h * da, q.b + h * db, q.c + h * dc};
          if (!in_box(t) || !ppt_feasible(geo, t, tol)) continue;
          q = t;
          moved = true;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return q;
}

}  // namespace detail

/// Maximizes p_S = (1 + a - b)/2 over PPT-feasible parameters: bisection on
/// the objective with a grid feasibility search, then a local polish. The
/// returned point is re-checked at tol/10.
inline BoundResult maximize_ps(const EmbeddedPairGeometry& geo, double tol = 1e-10) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double strict = tol / 10.0;
  PairParams best{0.5, 0.5, 0.5};
  if (!ppt_feasible(geo, best, strict)) throw SolverError("uninformative POVM reported infeasible", best);
  double lo = 0.0, hi = 1.0;  // gap a - b
  for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    PairParams q;
    if (detail::feasible_at_gap(geo, mid, strict, q)) {
      lo = mid;
      best = q;
    } else {
      hi = mid;
    }
  }
  best = detail::polish(geo, best, strict);
  if (!detail::in_box(best) || !ppt_feasible(geo, best, strict)) {
    throw SolverError("polished point failed certification", best);
  }
  return {best, success_probability(best)};
}

inline BoundResult maximize_ps(int big_j, double tol = 1e-10) {
  return maximize_ps(embedded_pair_projectors(big_j), tol);
}

}  // namespace dirhide::pptbound
