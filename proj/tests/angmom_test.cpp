#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dirhide/angmom.hpp"

namespace {

using dirhide::DomainError;
using dirhide::ResourceError;
using dirhide::angmom::HalfInt;
namespace am = dirhide::angmom;

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

TEST(Multiplicity, SmallCases) {
  EXPECT_EQ(am::multiplicity(2, h(2)), 1u);
  EXPECT_EQ(am::multiplicity(2, h(0)), 1u);
  EXPECT_EQ(am::multiplicity(4, h(2)), 3u);
  EXPECT_EQ(am::multiplicity(4, h(0)), 2u);
  EXPECT_EQ(am::multiplicity(5, h(1)), 5u);
}

TEST(Multiplicity, DimensionsAddUp) {
  for (int n = 1; n <= 30; ++n) {
    am::mp::cpp_int total = 0;
    for (HalfInt j : am::spin_labels(n)) total += am::multiplicity_exact(n, j) * (j.twice() + 1);
    EXPECT_EQ(total, am::mp::cpp_int(1) << n) << "N=" << n;
  }
}

TEST(Multiplicity, LargeNStaysFinite) {
  const double v = am::multiplicity_real(2000, h(1998));
  EXPECT_DOUBLE_EQ(v, 1999.0);
  EXPECT_NEAR(am::multiplicity_real(2000, h(1996)) / (2000.0 * 1999.0 / 2.0 - 2000.0), 1.0, 1e-12);
}

TEST(Multiplicity, BadLabels) {
  EXPECT_THROW(am::multiplicity(4, h(1)), DomainError);
  EXPECT_THROW(am::multiplicity(4, h(6)), DomainError);
  EXPECT_THROW(am::multiplicity(3, h(-1)), DomainError);
}

TEST(ClebschGordan, SpinHalfPair) {
  EXPECT_NEAR(am::clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(am::clebsch_gordan(h(1), h(-1), h(1), h(1), h(0), h(0)), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(am::clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(2)), 1.0);
}

TEST(ClebschGordan, TriangleViolationIsZero) {
  EXPECT_EQ(am::clebsch_gordan(h(1), h(1), h(1), h(1), h(6), h(2)), 0.0);
  EXPECT_EQ(am::clebsch_gordan(h(2), h(2), h(2), h(0), h(4), h(0)), 0.0);  // m mismatch
}

TEST(ClebschGordan, Orthogonality) {
  for (int tj1 : {1, 2, 3, 6}) {
    for (int tj2 : {1, 3, 6}) {
      const HalfInt j1 = h(tj1), j2 = h(tj2);
      for (int tj = std::abs(tj1 - tj2); tj <= tj1 + tj2; tj += 2) {
        for (int tm = -tj; tm <= tj; tm += 2) {
          for (int tjp = std::abs(tj1 - tj2); tjp <= tj1 + tj2; tjp += 2) {
            if (std::abs(tm) > tjp) continue;
            double s = 0.0;
            for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
              const int tm2 = tm - tm1;
              if (std::abs(tm2) > tj2) continue;
              s += am::clebsch_gordan(j1, h(tm1), j2, h(tm2), h(tj), h(tm)) *
                   am::clebsch_gordan(j1, h(tm1), j2, h(tm2), h(tjp), h(tm));
            }
            EXPECT_NEAR(s, tj == tjp ? 1.0 : 0.0, 1e-12);
          }
        }
      }
    }
  }
}

TEST(ClebschGordan, ExactSquareMatchesDouble) {
  const auto c = am::clebsch_gordan_exact(h(2), h(0), h(2), h(0), h(0), h(0));
  EXPECT_NEAR(c.value(), -1.0 / std::sqrt(3.0), 1e-15);
}

TEST(WignerD, SpinHalf) {
  for (double beta : {0.0, 0.3, 1.7, std::numbers::pi}) {
    EXPECT_NEAR(am::wigner_small_d(h(1), h(1), h(1), beta), std::cos(beta / 2), 1e-14);
    EXPECT_NEAR(am::wigner_small_d(h(1), h(-1), h(1), beta), std::sin(beta / 2), 1e-14);
  }
}

TEST(WignerD, FlipAtPi) {
  for (int tj : {1, 2, 5, 8}) {
    for (int tm = -tj; tm <= tj; tm += 2) {
      for (int tk = -tj; tk <= tj; tk += 2) {
        const double d = am::wigner_small_d(h(tj), h(tm), h(tk), std::numbers::pi);
        const double expect = tk == -tm ? (((tj - tk) / 2) % 2 == 0 ? 1.0 : -1.0) : 0.0;
        EXPECT_NEAR(d, expect, 1e-12) << tj << " " << tm << " " << tk;
      }
    }
  }
}

TEST(WignerD, Orthogonal) {
  for (int tj : {2, 3, 6, 9}) {
    for (double beta : {0.4, 2.2}) {
      for (int a = -tj; a <= tj; a += 2) {
        for (int b = -tj; b <= tj; b += 2) {
          double s = 0.0;
          for (int k = -tj; k <= tj; k += 2) {
            s += am::wigner_small_d(h(tj), h(a), h(k), beta) * am::wigner_small_d(h(tj), h(b), h(k), beta);
          }
          EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(SchurBasis, TwoSpins) {
  const auto basis = am::schur_basis(2);
  ASSERT_EQ(basis.size(), 4u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(basis[k].irrep.j, h(2));
  EXPECT_EQ(basis[0].m, h(2));
  EXPECT_EQ(basis[2].m, h(-2));
  EXPECT_EQ(basis[3].irrep.j, h(0));
  // Singlet: (|ud> - |du>)/sqrt2, up = bit 0.
  EXPECT_NEAR(std::abs(basis[3].amplitudes[1]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(basis[3].amplitudes[1], -basis[3].amplitudes[2], 1e-15);
}

TEST(SchurBasis, Orthonormal) {
  for (int n : {3, 5, 6}) {
    const auto basis = am::schur_basis(n);
    ASSERT_EQ(basis.size(), std::size_t{1} << n);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = a; b < basis.size(); ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < basis[a].amplitudes.size(); ++k) {
          s += basis[a].amplitudes[k] * basis[b].amplitudes[k];
        }
        EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(SchurBasis, DenseLimit) { EXPECT_THROW(am::schur_basis(13), ResourceError); }

TEST(HalfInt, Labels) {
  EXPECT_EQ(h(3).str(), "3/2");
  EXPECT_EQ(h(4).str(), "2");
  EXPECT_EQ(am::projection_index(h(4), h(-4)), 0);
  EXPECT_EQ(am::projection_at(h(3), 3), h(3));
  EXPECT_FALSE(am::valid_projection(h(2), h(1)));
}

}  // namespace
