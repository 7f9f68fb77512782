#pragma once

// Brute-force reference on the 2^N product space. Qubit k is bit (N-1-k) of
// a product-basis index and bit value 0 means spin up along z, so the first
// qubits are the most significant bits. Nothing here goes through the
// Clebsch-Gordan code: spin projectors come from Lagrange interpolation of
// the total-spin-squared operator.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "dirhide/angmom.hpp"
#include "dirhide/errors.hpp"
#include "dirhide/protocol.hpp"
#include "dirhide/quadrature.hpp"
#include "dirhide/states.hpp"

namespace dirhide::oracle {

using angmom::HalfInt;
using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Semilocal quadrature runs are restricted to this many spins.
inline constexpr int kSemilocalLimit = 8;

inline void check_dense(int n_spins, int limit = angmom::kDenseLimit) {
  if (n_spins < 1) throw DomainError("dense oracle needs at least one spin");
  if (n_spins > limit) {
    throw ResourceError("dense oracle limited to N <= " + std::to_string(limit));
  }
}

inline int qubit_count(const DenseOperator& op) {
  const auto d = static_cast<std::uint64_t>(op.rows());
  if (op.rows() != op.cols() || d == 0 || !std::has_single_bit(d)) {
    throw DomainError("operator is not square on a qubit register");
  }
  return std::countr_zero(d);
}

inline DenseOperator hermitize(const DenseOperator& a) { return 0.5 * (a + a.adjoint()); }

/// |n> = cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
inline Eigen::Vector2cd spin_coherent(const Eigen::Vector3d& n) {
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  return {std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
}

/// Tensor product of single-qubit states, first factor most significant.
inline DenseVector product_state(const std::vector<Eigen::Vector2cd>& factors) {
  DenseVector v = DenseVector::Ones(1);
  for (const auto& f : factors) {
    DenseVector next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next(2 * i) = v(i) * f(0);
      next(2 * i + 1) = v(i) * f(1);
    }
    v = std::move(next);
  }
  return v;
}

/// Explicit Eq.-(2)-type mixture: p |n>^N + (1-p) average over singlet
/// positions of |-n>^(N-2) (x) singlet.
inline DenseOperator dense_hiding_state(int n_spins, double p, const Eigen::Vector3d& n) {
  check_dense(n_spins);
  if (n_spins % 2 != 0) throw DomainError("hiding state needs an even number of spins");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const Eigen::Vector3d unit = n.normalized();
  const Eigen::Vector2cd up = spin_coherent(unit);
  const Eigen::Vector2cd down = spin_coherent(-unit);
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  DenseOperator rho = DenseOperator::Zero(dim, dim);
  if (n_spins >= 2 && p > 0.0) {
    const DenseVector v = product_state(std::vector<Eigen::Vector2cd>(n_spins, up));
    rho += p * v * v.adjoint();
  }
  if (p < 1.0) {
    const double pairs = 0.5 * n_spins * (n_spins - 1);
    for (int a = 0; a < n_spins; ++a) {
      for (int b = a + 1; b < n_spins; ++b) {
        // singlet (|up down> - |down up>)/sqrt2 is basis independent
        std::vector<Eigen::Vector2cd> f1(n_spins, down), f2(n_spins, down);
        f1[a] = Eigen::Vector2cd(1, 0);
        f1[b] = Eigen::Vector2cd(0, 1);
        f2[a] = Eigen::Vector2cd(0, 1);
        f2[b] = Eigen::Vector2cd(1, 0);
        const DenseVector v = (product_state(f1) - product_state(f2)) / std::sqrt(2.0);
        rho += (1.0 - p) / pairs * v * v.adjoint();
      }
    }
  }
  return hermitize(rho);
}

/// Total spin component along x, y or z (axis 0, 1, 2).
inline DenseOperator dense_total_spin(int n_spins, int axis) {
  check_dense(n_spins);
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  DenseOperator s = DenseOperator::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (int k = 0; k < n_spins; ++k) {
      const Eigen::Index bit = Eigen::Index{1} << (n_spins - 1 - k);
      const bool down = (i & bit) != 0;
      const Eigen::Index j = i ^ bit;  // flipped
      switch (axis) {
        case 0: s(j, i) += 0.5; break;
        case 1: s(j, i) += down ? Complex(0, -0.5) : Complex(0, 0.5); break;
        case 2: s(i, i) += down ? -0.5 : 0.5; break;
        default: throw DomainError("axis must be 0, 1 or 2");
      }
    }
  }
  return s;
}

inline DenseOperator dense_total_spin_squared(int n_spins) {
  DenseOperator out = DenseOperator::Zero(Eigen::Index{1} << n_spins, Eigen::Index{1} << n_spins);
  for (int a = 0; a < 3; ++a) {
    const DenseOperator s = dense_total_spin(n_spins, a);
    out += s * s;
  }
  return hermitize(out);
}

namespace detail {

/// Lagrange projector onto eigenvalue j(j+1) of a spin-squared operator whose
/// spectrum is contained in {k(k+1) : k in labels}.
inline DenseOperator lagrange_projector(const DenseOperator& s2, const std::vector<HalfInt>& labels,
                                        HalfInt j) {
  const double target = j.value() * (j.value() + 1.0);
  DenseOperator p = DenseOperator::Identity(s2.rows(), s2.cols());
  for (HalfInt k : labels) {
    if (k == j) continue;
    const double ev = k.value() * (k.value() + 1.0);
    p = (p * (s2 - ev * DenseOperator::Identity(s2.rows(), s2.cols()))) / (target - ev);
  }
  return hermitize(p);
}

}  // namespace detail

inline DenseOperator dense_total_j_projector(int n_spins, HalfInt j) {
  check_dense(n_spins);
  angmom::check_spin_label(n_spins, j);
  return detail::lagrange_projector(dense_total_spin_squared(n_spins), angmom::spin_labels(n_spins), j);
}

/// Projector onto total S_z = m in the product basis.
inline DenseOperator dense_sz_projector(int n_spins, HalfInt m) {
  check_dense(n_spins);
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  DenseOperator p = DenseOperator::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int downs = std::popcount(static_cast<std::uint64_t>(i));
    if (n_spins - 2 * downs == m.twice()) p(i, i) = 1.0;
  }
  return p;
}

/// Operator exchanging qubits a and b.
inline DenseOperator dense_transposition(int n_spins, int a, int b) {
  check_dense(n_spins);
  if (a < 0 || b < 0 || a >= n_spins || b >= n_spins) throw DomainError("qubit index out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  const Eigen::Index ba = Eigen::Index{1} << (n_spins - 1 - a);
  const Eigen::Index bb = Eigen::Index{1} << (n_spins - 1 - b);
  DenseOperator p = DenseOperator::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index j = i;
    if (((i & ba) != 0) != ((i & bb) != 0)) j = i ^ ba ^ bb;
    p(j, i) = 1.0;
  }
  return p;
}

/// Partial trace keeping the listed qubits (strictly increasing indices);
/// the kept qubits keep their relative order.
inline DenseOperator dense_partial_trace(const DenseOperator& op, const std::vector<int>& keep) {
  const int n = qubit_count(op);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n || (i > 0 && keep[i] <= keep[i - 1])) {
      throw DomainError("keep set must be strictly increasing qubit indices");
    }
  }
  std::vector<int> traced;
  for (int q = 0, k = 0; q < n; ++q) {
    if (k < static_cast<int>(keep.size()) && keep[k] == q) ++k; else traced.push_back(q);
  }
  const auto scatter = [n](const std::vector<int>& qubits, Eigen::Index bits) {
    Eigen::Index full = 0;
    const int len = static_cast<int>(qubits.size());
    for (int i = 0; i < len; ++i) {
      if (bits & (Eigen::Index{1} << (len - 1 - i))) full |= Eigen::Index{1} << (n - 1 - qubits[i]);
    }
    return full;
  };
  const Eigen::Index dk = Eigen::Index{1} << keep.size();
  const Eigen::Index dt = Eigen::Index{1} << traced.size();
  std::vector<Eigen::Index> kept_idx(dk), traced_idx(dt);
  for (Eigen::Index i = 0; i < dk; ++i) kept_idx[i] = scatter(keep, i);
  for (Eigen::Index t = 0; t < dt; ++t) traced_idx[t] = scatter(traced, t);
  DenseOperator out = DenseOperator::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex s = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t) s += op(kept_idx[i] | traced_idx[t], kept_idx[j] | traced_idx[t]);
      out(i, j) = s;
    }
  }
  return out;
}

/// Per-copy coupled-basis diagonal weights tr(P_j Pi_m rho)/n_j, with the
/// quantization axis z.
inline states::DiagonalBlockState dense_block_weights(const DenseOperator& rho) {
  const int n = qubit_count(rho);
  check_dense(n);
  const DenseOperator s2 = dense_total_spin_squared(n);
  const auto labels = angmom::spin_labels(n);
  states::DiagonalBlockState::Blocks blocks;
  for (HalfInt j : labels) {
    const DenseOperator pj = detail::lagrange_projector(s2, labels, j);
    const DenseOperator pr = pj * rho;
    std::vector<double> values(angmom::block_size(j));
    for (int k = 0; k < angmom::block_size(j); ++k) {
      const HalfInt m = angmom::projection_at(j, k);
      const double v = (dense_sz_projector(n, m) * pr).trace().real() / angmom::multiplicity_real(n, j);
      if (v < -1e-10) throw ContractError("operator has a negative coupled-basis weight");
      values[k] = std::max(v, 0.0);  // roundoff
    }
    blocks.emplace(j, std::move(values));
  }
  return states::DiagonalBlockState(n, std::move(blocks));
}

/// Optimal joint alignment for an encoding along z: sum_j |tr(P_j S_z rho)|/(j+1).
inline double dense_optimal_joint_delta(const DenseOperator& rho) {
  const int n = qubit_count(rho);
  check_dense(n);
  const DenseOperator s2 = dense_total_spin_squared(n);
  const DenseOperator sz = dense_total_spin(n, 2);
  const auto labels = angmom::spin_labels(n);
  double delta = 0.0;
  for (HalfInt j : labels) {
    if (j.twice() == 0) continue;
    const DenseOperator pj = detail::lagrange_projector(s2, labels, j);
    delta += std::abs((pj * sz * rho).trace().real()) / (j.value() + 1.0);
  }
  return delta;
}

struct SemilocalTable {
  std::vector<double> alignment;    // sum over m of weight * (m.z) * prob(m, x)
  std::vector<double> probability;  // sum over m of weight * prob(m, x)
};

namespace detail {

/// Rotates |psi> by U(m)^dagger on every qubit, where U(m)|up> = |m>.
inline DenseVector rotate_to_axis(const DenseVector& psi, int n_spins, const Eigen::Vector3d& m) {
  const Eigen::Vector2cd plus = spin_coherent(m);
  const Eigen::Vector2cd minus = spin_coherent(-m);
  Eigen::Matrix2cd u;
  u.col(0) = plus;
  u.col(1) = minus;
  const Eigen::Matrix2cd ud = u.adjoint();
  DenseVector v = psi;
  for (int k = 0; k < n_spins; ++k) {
    const Eigen::Index bit = Eigen::Index{1} << (n_spins - 1 - k);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i & bit) continue;
      const Complex a = v(i), b = v(i | bit);
      v(i) = ud(0, 0) * a + ud(0, 1) * b;
      v(i | bit) = ud(1, 0) * a + ud(1, 1) * b;
    }
  }
  return v;
}

/// Seed of the first-stage covariant POVM along z on n0 qubits:
/// (N0+1) P_J0 Pi_{Sz=J0} + (N0-1) P_{J0-1} Pi_{Sz=J0-1}.
inline DenseOperator first_stage_seed(int n0) {
  const HalfInt j0 = HalfInt::from_twice(n0);
  const HalfInt j1 = HalfInt::from_twice(n0 - 2);
  DenseOperator o = (n0 + 1.0) * dense_total_j_projector(n0, j0) * dense_sz_projector(n0, j0);
  o += (n0 - 1.0) * dense_total_j_projector(n0, j1) * dense_sz_projector(n0, j1);
  return hermitize(o);
}

}  // namespace detail

/// Outcome statistics of M(m, x) = O(m) (x) E(m, x) on rho, integrated over m
/// with the given quadrature. x counts second-stage spins found anti-aligned
/// with m.
inline SemilocalTable dense_semilocal_table(const DenseOperator& rho, const SplitSpec& split,
                                            const quadrature::SphereQuadrature& quad) {
  split.validate();
  const int n = qubit_count(rho);
  if (n != split.n_spins) throw ContractError("state and split disagree on N");
  check_dense(n, kSemilocalLimit);
  if (quad.degree() < 2 * n) {
    throw ContractError("quadrature degree " + std::to_string(quad.degree()) + " below 2N = " +
                        std::to_string(2 * n));
  }
  const int n0 = split.first_stage, n1 = split.second_stage();
  const DenseOperator seed = detail::first_stage_seed(n0);
  Eigen::SelfAdjointEigenSolver<DenseOperator> eig(hermitize(rho));
  const Eigen::Index d0 = Eigen::Index{1} << n0, d1 = Eigen::Index{1} << n1;

  SemilocalTable table{std::vector<double>(n1 + 1, 0.0), std::vector<double>(n1 + 1, 0.0)};
  for (const auto& node : quad.nodes()) {
    std::vector<double> prob(n1 + 1, 0.0);
    for (Eigen::Index e = 0; e < eig.eigenvalues().size(); ++e) {
      const double w = eig.eigenvalues()(e);
      if (w <= 1e-14) continue;
      const DenseVector v = detail::rotate_to_axis(eig.eigenvectors().col(e), n, node.direction);
      const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          a(v.data(), d0, d1);
      for (Eigen::Index lo = 0; lo < d1; ++lo) {
        const DenseVector col = a.col(lo);
        const int x = std::popcount(static_cast<std::uint64_t>(lo));
        prob[x] += w * col.dot(seed * col).real();
      }
    }
    for (int x = 0; x <= n1; ++x) {
      table.probability[x] += node.weight * prob[x];
      table.alignment[x] += node.weight * node.direction.z() * prob[x];
    }
  }
  return table;
}

/// Mean alignment of the two-stage protocol on the p = 1/2 hiding state.
inline double dense_semilocal_delta(const SplitSpec& split, const GuessFunction& guess,
                                    const quadrature::SphereQuadrature& quad) {
  guess.check_matches(split);
  const auto rho = dense_hiding_state(split.n_spins, 0.5, Eigen::Vector3d::UnitZ());
  const auto t = dense_semilocal_table(rho, split, quad);
  double delta = 0.0;
  for (int x = 0; x <= split.second_stage(); ++x) delta += (guess(x) ? -1.0 : 1.0) * t.alignment[x];
  return delta;
}

/// Probability that f(x) names the branch (0 for the aligned branch, 1 for
/// the singlet branch) under equal priors.
inline double dense_exact_ps(const SplitSpec& split, const GuessFunction& guess,
                             const quadrature::SphereQuadrature& quad) {
  guess.check_matches(split);
  const auto z = Eigen::Vector3d::UnitZ();
  const auto aligned = dense_semilocal_table(dense_hiding_state(split.n_spins, 1.0, z), split, quad);
  const auto singlet = dense_semilocal_table(dense_hiding_state(split.n_spins, 0.0, z), split, quad);
  double ps = 0.0;
  for (int x = 0; x <= split.second_stage(); ++x) {
    ps += 0.5 * (guess(x) ? singlet.probability[x] : aligned.probability[x]);
  }
  return ps;
}

/// Spin operators of a single spin j in the basis m = j, j-1, ..., -j.
struct SpinMatrices {
  Eigen::MatrixXd z, plus, minus;
};

inline SpinMatrices dense_spin_matrices(HalfInt j) {
  if (j.twice() < 0) throw DomainError("spin must be non-negative");
  const int d = angmom::block_size(j);
  SpinMatrices s{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  for (int k = 0; k < d; ++k) {
    const double m = j.value() - k;
    s.z(k, k) = m;
    if (k > 0) {
      s.plus(k - 1, k) = std::sqrt(j.value() * (j.value() + 1.0) - m * (m + 1.0));
      s.minus(k, k - 1) = s.plus(k - 1, k);
    }
  }
  return s;
}

/// Projector onto total spin `total` of two spin-j systems, |m1 m2> ordered
/// with m1 most significant and m descending.
inline Eigen::MatrixXd dense_pair_projector(HalfInt j, HalfInt total) {
  const SpinMatrices s = dense_spin_matrices(j);
  const int d = angmom::block_size(j);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  const auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index k = 0; k < a.cols(); ++k) out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
    }
    return out;
  };
  const Eigen::MatrixXd sz = kron(s.z, id) + kron(id, s.z);
  const Eigen::MatrixXd sp = kron(s.plus, id) + kron(id, s.plus);
  const Eigen::MatrixXd sm = kron(s.minus, id) + kron(id, s.minus);
  const Eigen::MatrixXd s2 = sm * sp + sz * sz + sz;
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d * d, d * d);
  const double target = total.value() * (total.value() + 1.0);
  for (int tw = 2 * j.twice(); tw >= 0; tw -= 2) {
    if (tw == total.twice()) continue;
    const double ev = 0.25 * tw * (tw + 2.0);
    p = p * (s2 - ev * Eigen::MatrixXd::Identity(d * d, d * d)) / (target - ev);
  }
  return 0.5 * (p + p.transpose());
}

/// tr_12[(Q (x) 1) |psi><psi|] for |psi> = |psi+>^13 |psi+>^24 built from the
/// two top levels of four spin-J/2 parties, restricted to the embedded
/// two-level subspace of parties 34 (basis |e_k e_l>, k most significant).
/// Q = a P_J + b P_{J-1} + c (rest) on parties 12.
inline Eigen::Matrix4d dense_four_party_conditional(int big_j, double a, double b, double c) {
  if (big_j < 2 || big_j % 2 != 0) throw DomainError("four-party oracle needs even J >= 2");
  const HalfInt j = HalfInt::integer(big_j / 2);
  const int d = angmom::block_size(j);
  const Eigen::MatrixXd pj = dense_pair_projector(j, HalfInt::integer(big_j));
  const Eigen::MatrixXd pj1 = dense_pair_projector(j, HalfInt::integer(big_j - 1));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d * d, d * d);
  const Eigen::MatrixXd q = a * pj + b * pj1 + c * (id - pj - pj1);
  // |psi> = 1/2 sum_{k,l} |k^ l^>_12 |k l>_34 with k^ = 1-k (from |01>+|10>).
  // Conditional state on 34: 1/4 sum <k'^ l'^|Q|k^ l^> |k l><k' l'|.
  const auto idx = [d](int k, int l) { return k * d + l; };
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      for (int kp = 0; kp < 2; ++kp) {
        for (int lp = 0; lp < 2; ++lp) {
          out(2 * k + l, 2 * kp + lp) = 0.25 * q(idx(1 - kp, 1 - lp), idx(1 - k, 1 - l));
        }
      }
    }
  }
  return out;
}

}  // namespace dirhide::oracle
