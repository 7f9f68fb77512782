#include <cmath>

#include <gtest/gtest.h>

#include "dirhide/oracle.hpp"
#include "dirhide/states.hpp"

namespace {

using dirhide::DomainError;
using dirhide::angmom::HalfInt;
namespace st = dirhide::states;
namespace oracle = dirhide::oracle;

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

void expect_same(const st::DiagonalBlockState& a, const st::DiagonalBlockState& b, double tol) {
  ASSERT_EQ(a.spins(), b.spins());
  for (HalfInt j : dirhide::angmom::spin_labels(a.spins())) {
    for (int k = 0; k <= j.twice(); ++k) {
      const HalfInt m = dirhide::angmom::projection_at(j, k);
      EXPECT_NEAR(a.coefficient(j, m), b.coefficient(j, m), tol) << "j=" << j.str() << " m=" << m.str();
    }
  }
}

TEST(HidingState, SingletAtNTwo) {
  const auto s = st::hiding_state({2, 0.0});
  EXPECT_DOUBLE_EQ(s.coefficient(h(0), h(0)), 1.0);
  EXPECT_DOUBLE_EQ(s.coefficient(h(2), h(2)), 0.0);
}

TEST(HidingState, FourSpinsBalanced) {
  const auto s = st::hiding_state({4, 1.0 / 3.0});
  EXPECT_NEAR(s.coefficient(h(4), h(4)), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.coefficient(h(2), h(-2)), 2.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.multiplicity(h(2)), 3.0);
  EXPECT_NEAR(s.total_weight(), 1.0, 1e-15);
}

TEST(HidingState, Parallel) {
  const auto s = st::hiding_state({6, 1.0});
  EXPECT_DOUBLE_EQ(s.coefficient(h(6), h(6)), 1.0);
  EXPECT_DOUBLE_EQ(s.coefficient(h(4), h(-4)), 0.0);
}

TEST(HidingState, BadInput) {
  EXPECT_THROW(st::hiding_state({5, 0.5}), DomainError);
  EXPECT_THROW(st::hiding_state({4, 1.5}), DomainError);
  EXPECT_THROW(st::DiagonalBlockState(2, st::empty_blocks({h(2)})), DomainError);
}

TEST(HidingState, MatchesDense) {
  for (int n : {2, 4, 6}) {
    for (double p : {0.0, 1.0 / 3.0, 0.7}) {
      const auto rho = oracle::dense_hiding_state(n, p, Eigen::Vector3d::UnitZ());
      EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
      expect_same(oracle::dense_block_weights(rho), st::hiding_state({n, p}), 1e-12);
    }
  }
}

TEST(BalancedP, Values) {
  EXPECT_DOUBLE_EQ(st::balanced_p(2), 0.0);
  EXPECT_NEAR(st::balanced_p(4), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(st::balanced_p(1000000), 0.5, 1e-6);
  EXPECT_THROW(st::balanced_p(3), DomainError);
}

TEST(Bloch, ClosedFormAndBlocks) {
  for (int n : {2, 4, 10, 100}) {
    for (double p : {0.0, 0.25, 1.0}) {
      const st::HidingSpec spec{n, p};
      EXPECT_NEAR(st::single_particle_bloch(spec), st::single_particle_bloch(st::hiding_state(spec)), 1e-12);
    }
    EXPECT_NEAR(st::single_particle_bloch(st::HidingSpec{n, 1.0}), 1.0, 1e-15);
    EXPECT_NEAR(st::single_particle_bloch(st::HidingSpec{n, st::balanced_p(n)}), 0.0, 1e-15);
  }
}

TEST(Bloch, MatchesDenseReduction) {
  for (auto [n, p] : {std::pair{4, 1.0 / 3.0}, std::pair{6, 0.5}}) {
    const auto rho = oracle::dense_hiding_state(n, p, Eigen::Vector3d::UnitZ());
    const auto one = oracle::dense_partial_trace(rho, {0});
    const double r = (one(0, 0) - one(1, 1)).real();
    EXPECT_NEAR(r, st::single_particle_bloch(st::HidingSpec{n, p}), 1e-12);
  }
}

TEST(TaggedMixture, Endpoints) {
  const auto par = st::tagged_mixture(4, 1.0);
  EXPECT_DOUBLE_EQ(par.coefficient(h(4), h(4)), 1.0);
  const auto tag = st::tagged_mixture(4, 0.0);
  EXPECT_NEAR(tag.coefficient(h(2), h(2)), 1.0 / 3.0, 1e-15);
}

TEST(TraceOut, NothingDiscarded) {
  const st::HidingSpec spec{8, 0.4};
  expect_same(st::trace_out(spec, 0), st::hiding_state(spec), 0.0);
  EXPECT_THROW(st::trace_out(spec, 7), DomainError);
}

TEST(TraceOut, MatchesDense) {
  for (int n : {4, 6, 8}) {
    const double p = st::balanced_p(n);
    const auto rho = oracle::dense_hiding_state(n, p, Eigen::Vector3d::UnitZ());
    for (int m = 1; m <= n - 2; ++m) {
      std::vector<int> keep;
      for (int k = 0; k < n - m; ++k) keep.push_back(k);
      const auto reduced = oracle::dense_block_weights(oracle::dense_partial_trace(rho, keep));
      expect_same(st::trace_out({n, p}, m), reduced, 1e-10);
    }
  }
}

TEST(TraceOut, GenericAgreesAndComposes) {
  const st::HidingSpec spec{12, 0.45};
  for (int m : {1, 3, 6}) {
    expect_same(st::trace_out(spec, m), st::trace_out_spins(st::hiding_state(spec), m), 1e-12);
  }
  expect_same(st::trace_out_spins(st::trace_out(spec, 2), 3), st::trace_out(spec, 5), 1e-12);
}

}  // namespace
