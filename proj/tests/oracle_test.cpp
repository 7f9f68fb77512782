#include <cmath>

#include <gtest/gtest.h>

#include "dirhide/oracle.hpp"
#include "dirhide/semilocal.hpp"

namespace {

using dirhide::ContractError;
using dirhide::DomainError;
using dirhide::ResourceError;
using dirhide::angmom::HalfInt;
namespace oracle = dirhide::oracle;
namespace quadrature = dirhide::quadrature;

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

TEST(Quadrature, WeightsAndPolynomials) {
  for (int deg : {2, 8, 17}) {
    const quadrature::SphereQuadrature q(deg);
    double w = 0.0, z2 = 0.0, x4 = 0.0, xyz = 0.0;
    for (const auto& node : q.nodes()) {
      EXPECT_GT(node.weight, 0.0);
      w += node.weight;
      const auto& d = node.direction;
      z2 += node.weight * d.z() * d.z();
      x4 += node.weight * std::pow(d.x(), 4);
      xyz += node.weight * d.x() * d.y() * d.z();
    }
    EXPECT_NEAR(w, 1.0, 1e-14);
    EXPECT_NEAR(z2, 1.0 / 3.0, 1e-14);
    if (deg >= 4) EXPECT_NEAR(x4, 0.2, 1e-14);
    EXPECT_NEAR(xyz, 0.0, 1e-14);
  }
}

TEST(DenseHiding, SingletAndTrace) {
  const auto rho = oracle::dense_hiding_state(2, 0.0, Eigen::Vector3d::UnitZ());
  EXPECT_NEAR((rho - oracle::dense_total_j_projector(2, h(0))).norm(), 0.0, 1e-14);
  const Eigen::Vector3d n = Eigen::Vector3d(1.0, -2.0, 0.5).normalized();
  const auto r6 = oracle::dense_hiding_state(6, 0.3, n);
  EXPECT_NEAR(r6.trace().real(), 1.0, 1e-12);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<oracle::DenseOperator>(r6).eigenvalues().minCoeff(), -1e-12);
  EXPECT_THROW(oracle::dense_hiding_state(14, 0.5, n), ResourceError);
}

TEST(Projectors, TracesAndCompleteness) {
  EXPECT_NEAR(oracle::dense_total_j_projector(2, h(2)).trace().real(), 3.0, 1e-12);
  EXPECT_NEAR(oracle::dense_total_j_projector(2, h(0)).trace().real(), 1.0, 1e-12);
  EXPECT_NEAR(oracle::dense_total_j_projector(4, h(2)).trace().real(), 9.0, 1e-12);
  for (int n : {3, 5, 6}) {
    oracle::DenseOperator sum = oracle::DenseOperator::Zero(1 << n, 1 << n);
    for (HalfInt j : dirhide::angmom::spin_labels(n)) {
      const auto p = oracle::dense_total_j_projector(n, j);
      EXPECT_NEAR((p * p - p).norm(), 0.0, 1e-10);
      EXPECT_NEAR((p - p.adjoint()).norm(), 0.0, 1e-12);
      EXPECT_NEAR(p.trace().real(), dirhide::angmom::multiplicity_real(n, j) * (j.twice() + 1), 1e-9);
      for (int a = 0; a + 1 < n; ++a) {
        const auto t = oracle::dense_transposition(n, a, a + 1);
        EXPECT_NEAR((t * p - p * t).norm(), 0.0, 1e-10);
      }
      sum += p;
    }
    EXPECT_NEAR((sum - oracle::DenseOperator::Identity(1 << n, 1 << n)).norm(), 0.0, 1e-10);
  }
}

TEST(Projectors, SchurBasisEigenvectors) {
  const int n = 5;
  const auto s2 = oracle::dense_total_spin_squared(n);
  for (const auto& v : dirhide::angmom::schur_basis(n)) {
    Eigen::VectorXcd psi(1 << n);
    for (int k = 0; k < (1 << n); ++k) psi[k] = v.amplitudes[k];
    const double j = v.irrep.j.value();
    EXPECT_NEAR((s2 * psi - j * (j + 1) * psi).norm(), 0.0, 1e-10);
    const auto sz = oracle::dense_total_spin(n, 2);
    EXPECT_NEAR((sz * psi - v.m.value() * psi).norm(), 0.0, 1e-10);
  }
}

TEST(PartialTrace, Examples) {
  const auto rho = oracle::dense_hiding_state(2, 0.0, Eigen::Vector3d::UnitZ());
  const auto one = oracle::dense_partial_trace(rho, {1});
  EXPECT_NEAR((one - 0.5 * Eigen::Matrix2cd::Identity()).norm(), 0.0, 1e-14);
  const auto none = oracle::dense_partial_trace(rho, {});
  ASSERT_EQ(none.rows(), 1);
  EXPECT_NEAR(none(0, 0).real(), 1.0, 1e-14);
  const auto r6 = oracle::dense_hiding_state(6, 0.5, Eigen::Vector3d::UnitZ());
  EXPECT_NEAR(oracle::dense_partial_trace(r6, {0, 2, 3, 5}).trace().real(), 1.0, 1e-12);
  EXPECT_THROW(oracle::dense_partial_trace(r6, {2, 1}), DomainError);
  EXPECT_THROW(oracle::dense_partial_trace(r6, {0, 6}), DomainError);
}

TEST(PartialTrace, HidingStateKeepFour) {
  const auto rho = oracle::dense_hiding_state(6, 0.5, Eigen::Vector3d::UnitZ());
  const auto reduced = oracle::dense_block_weights(oracle::dense_partial_trace(rho, {0, 1, 2, 3}));
  const auto closed = dirhide::states::trace_out({6, 0.5}, 2);
  for (HalfInt j : dirhide::angmom::spin_labels(4)) {
    for (int k = 0; k <= j.twice(); ++k) {
      const HalfInt m = dirhide::angmom::projection_at(j, k);
      EXPECT_NEAR(reduced.coefficient(j, m), closed.coefficient(j, m), 1e-12);
    }
  }
}

TEST(SemilocalOracle, DegreeConverged) {
  const dirhide::SplitSpec split{4, 2};
  const auto f = dirhide::GuessFunction::edges_forward(2);
  const double a = oracle::dense_semilocal_delta(split, f, quadrature::SphereQuadrature(8));
  const double b = oracle::dense_semilocal_delta(split, f, quadrature::SphereQuadrature(12));
  EXPECT_NEAR(a, b, 1e-12);
  EXPECT_NEAR(oracle::dense_semilocal_delta(split, f.complement(), quadrature::SphereQuadrature(8)), -a, 1e-12);
}

TEST(SemilocalOracle, Contracts) {
  const dirhide::SplitSpec split{4, 2};
  const auto f = dirhide::GuessFunction::constant(2, 0);
  EXPECT_THROW(oracle::dense_semilocal_delta(split, f, quadrature::SphereQuadrature(6)), ContractError);
  const auto rho = oracle::dense_hiding_state(4, 0.5, Eigen::Vector3d::UnitZ());
  EXPECT_THROW(oracle::dense_semilocal_table(rho, {6, 3}, quadrature::SphereQuadrature(12)), ContractError);
}

TEST(SemilocalOracle, OutcomesAreNormalized) {
  for (double p : {0.0, 1.0}) {
    const auto rho = oracle::dense_hiding_state(6, p, Eigen::Vector3d::UnitZ());
    const auto t = oracle::dense_semilocal_table(rho, {6, 3}, quadrature::SphereQuadrature(12));
    double total = 0.0;
    for (double v : t.probability) total += v;
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(SemilocalOracle, ExactPsSingleSecondStageSpin) {
  // N=4, N0=3: one second-stage spin, so x is 0 or 1.
  const dirhide::SplitSpec split{4, 3};
  const quadrature::SphereQuadrature quad(12);
  const auto z = Eigen::Vector3d::UnitZ();
  const auto aligned = oracle::dense_semilocal_table(oracle::dense_hiding_state(4, 1.0, z), split, quad);
  const auto singlet = oracle::dense_semilocal_table(oracle::dense_hiding_state(4, 0.0, z), split, quad);
  EXPECT_NEAR(aligned.probability[0] + aligned.probability[1], 1.0, 1e-12);
  EXPECT_NEAR(singlet.probability[0] + singlet.probability[1], 1.0, 1e-12);
  EXPECT_NEAR(oracle::dense_exact_ps(split, dirhide::GuessFunction::constant(1, 0), quad), 0.5, 1e-12);
  const auto f = dirhide::GuessFunction::from_code(1, 2);
  const double expected = 0.5 * (aligned.probability[0] + singlet.probability[1]);
  EXPECT_GT(expected, 0.5);
  EXPECT_NEAR(oracle::dense_exact_ps(split, f, quad), expected, 1e-12);
  EXPECT_NEAR(oracle::dense_exact_ps(split, f.complement(), quad), 1.0 - expected, 1e-12);
}

TEST(PairProjector, SpinOneCompleteness) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(9, 9);
  for (int t : {0, 2, 4}) sum += oracle::dense_pair_projector(h(2), h(t));
  EXPECT_NEAR((sum - Eigen::MatrixXd::Identity(9, 9)).norm(), 0.0, 1e-12);
}

}  // namespace
