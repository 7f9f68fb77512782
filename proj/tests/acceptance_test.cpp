// Acceptance criteria, one test (and one PASS/FAIL line) per criterion.

#include <iostream>

#include <gtest/gtest.h>

#include "dirhide/acceptance.hpp"

namespace {

using dirhide::acceptance::Options;
using dirhide::acceptance::Result;

void check(Result (*fn)(const Options&)) {
  const Result r = fn(Options{});
  std::cout << dirhide::acceptance::format_line(r) << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Acceptance, C01JointFidelity) { check(dirhide::acceptance::joint_fidelity); }
TEST(Acceptance, C02SingleCopy) { check(dirhide::acceptance::single_copy); }
TEST(Acceptance, C03HidingOptimality) { check(dirhide::acceptance::hiding_optimality); }
TEST(Acceptance, C04SemilocalOracle) { check(dirhide::acceptance::semilocal_vs_oracle); }
TEST(Acceptance, C05Asymptote) { check(dirhide::acceptance::asymptote); }
TEST(Acceptance, C06Discrimination) { check(dirhide::acceptance::discrimination); }
TEST(Acceptance, C07PptBound) { check(dirhide::acceptance::ppt_bound); }
TEST(Acceptance, C08Robustness) { check(dirhide::acceptance::robustness); }
TEST(Acceptance, C09Figure1Ordering) { check(dirhide::acceptance::figure1_ordering); }
TEST(Acceptance, C10Determinism) { check(dirhide::acceptance::determinism); }

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
