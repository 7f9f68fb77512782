#include <cmath>

#include <gtest/gtest.h>

#include "dirhide/fidelity.hpp"
#include "dirhide/montecarlo.hpp"
#include "dirhide/oracle.hpp"

namespace {

using dirhide::DomainError;
using dirhide::SplitSpec;
namespace mc = dirhide::montecarlo;
namespace rng = dirhide::rng;
namespace sl = dirhide::semilocal;

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(rng::philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (rng::Counter{0x6627e8d5U, 0xe169c58dU, 0xbc57ac4cU, 0x9b00dbd8U}));
  EXPECT_EQ(rng::philox4x32_10({~0U, ~0U, ~0U, ~0U}, {~0U, ~0U}),
            (rng::Counter{0x408f276dU, 0x41c83b0eU, 0xa20bc7c6U, 0x6d5451fdU}));
  EXPECT_EQ(rng::philox4x32_10({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U}, {0xa4093822U, 0x299f31d0U}),
            (rng::Counter{0xd16cfe09U, 0x94fdccebU, 0x5001e420U, 0x24126ea1U}));
}

TEST(Stream, AddressedDeterminism) {
  rng::Stream a(42, 1, 7), b(42, 1, 7), c(42, 2, 7), d(43, 1, 7);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u32();
    EXPECT_EQ(x, b.next_u32());
    EXPECT_NE(x, c.next_u32());
    EXPECT_NE(x, d.next_u32());
  }
}

TEST(Stream, BelowStaysInRange) {
  rng::Stream s(1, 0, 0);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[s.below(7)];
  for (int v : hist) EXPECT_NEAR(v, 10000, 500);
}

TEST(Semilocal, ThreadCountDoesNotMatter) {
  mc::RunConfig cfg{12, 6, 30000, 9, mc::Protocol::semilocal, 1};
  const auto a = mc::simulate(cfg);
  cfg.threads = 4;
  const auto b = mc::simulate(cfg);
  EXPECT_EQ(a.fidelity, b.fidelity);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.p_success, b.p_success);
}

TEST(Semilocal, MatchesClosedForm) {
  for (const SplitSpec split : {SplitSpec{4, 2}, SplitSpec{8, 4}, SplitSpec{30, 15}}) {
    const auto est = mc::simulate({split.n_spins, split.first_stage, 200000, 21, mc::Protocol::semilocal, 2});
    const double exact = 0.5 * (1.0 + sl::optimize_guess(split).delta);
    EXPECT_LE(std::abs(est.fidelity - exact), 3.5 * est.std_error) << split.n_spins;
  }
}

TEST(Semilocal, ErrorBarsCalibrated) {
  const SplitSpec split{6, 3};
  const double exact = 0.5 * (1.0 + sl::optimize_guess(split).delta);
  int outside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto est = mc::simulate({6, 3, 4000, seed, mc::Protocol::semilocal, 1});
    if (std::abs(est.fidelity - exact) > 2.0 * est.std_error) ++outside;
    EXPECT_LE(std::abs(est.fidelity - exact), 4.0 * est.std_error);
  }
  // About 5 of 100 runs should fall outside 2 sigma.
  EXPECT_LE(outside, 15);
}

TEST(Tomography, BelowSemilocal) {
  for (int n : {8, 16}) {
    const auto tomo = mc::simulate({n, n / 2, 40000, 4, mc::Protocol::tomography, 2});
    const double semi = 0.5 * (1.0 + sl::optimize_guess(SplitSpec::half(n)).delta);
    EXPECT_GT(tomo.fidelity, 0.5);
    EXPECT_LT(tomo.fidelity, semi + 3.0 * tomo.std_error);
  }
}

TEST(Tomography, Errors) {
  EXPECT_THROW(mc::simulate({4, 2, 100, 1, mc::Protocol::tomography, 1}), DomainError);
  EXPECT_THROW(mc::simulate({4, 2, 0, 1, mc::Protocol::semilocal, 1}), DomainError);
  EXPECT_THROW(mc::simulate({4, 2, 10, 1, mc::Protocol::adaptive, 1}), DomainError);
}

TEST(Adaptive, TwoSpinsSinglet) {
  const auto s = mc::optimize_adaptive(2, 2, 1);
  EXPECT_NEAR(s.fidelity, 0.5, 1e-9);
  EXPECT_NEAR(mc::adaptive_total_probability(2, 0.0, s.nodes), 1.0, 1e-12);
}

TEST(Adaptive, FourSpinsBetweenBounds) {
  const double p = dirhide::states::balanced_p(4);
  const auto s = mc::optimize_adaptive(4, 3, 5, p);
  EXPECT_GE(s.fidelity, 0.5);
  EXPECT_LT(s.fidelity, 0.5 * (1.0 + dirhide::fidelity::joint_delta_closed(4, p)));
  EXPECT_NEAR(mc::adaptive_fidelity(4, p, s.nodes), s.fidelity, 1e-12);
  EXPECT_NEAR(mc::adaptive_total_probability(4, p, s.nodes), 1.0, 1e-12);
  EXPECT_EQ(s.guesses.size(), 16u);
}

TEST(Adaptive, MoreRestartsNeverWorse) {
  const auto a = mc::optimize_adaptive(4, 1, 8, 0.5);
  const auto b = mc::optimize_adaptive(4, 3, 8, 0.5);
  EXPECT_GE(b.fidelity, a.fidelity - 1e-12);
}

TEST(Adaptive, Errors) {
  EXPECT_THROW(mc::optimize_adaptive(6, 1, 1), DomainError);
  EXPECT_THROW(mc::optimize_adaptive(3, 1, 1), DomainError);
  EXPECT_THROW(mc::optimize_adaptive(4, 0, 1), DomainError);
}

TEST(Moments, MergeMatchesSequential) {
  dirhide::parallel::Moments all, left, right;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i * 0.7);
    all.add(x);
    (i < 37 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.count, all.count);
  EXPECT_NEAR(left.mean, all.mean, 1e-15);
  EXPECT_NEAR(left.sample_variance(), all.sample_variance(), 1e-14);
}

}  // namespace
