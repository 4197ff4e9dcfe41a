#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpspin/equilibria.hpp"
#include "test_support.hpp"

using namespace mpspin;

namespace {

void expect_equilibrium(const EquilibriumRecord& rec) {
  const ReducedState& s = rec.state;
  const IntegralParams& p = rec.params;
  EXPECT_LT(equilibrium_residual(s, p), 1e-8);
  const auto [fr, fth] = tulczyjew_residuals(s, p);
  EXPECT_NEAR(fr, 0.0, 1e-10);
  EXPECT_NEAR(fth, 0.0, 1e-10);
  EXPECT_NEAR(hamiltonian_reduced(s, p), -0.5, 1e-10);
  EXPECT_NEAR(casimir_circ(s), p.c * p.c, 1e-10 * std::max(1.0, p.c * p.c));
  EXPECT_NEAR(casimir_F(s), p.ell, 1e-10 * std::max(1.0, p.ell));
}

}  // namespace

TEST(Sigma0, GeodesicCusp) {
  const auto [ell, En] = sigma0_values(6.0, 0.0, 1);
  EXPECT_NEAR(ell, 12.0, 1e-12);
  EXPECT_NEAR(En, (1 - 2 / 6.0) / std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(cusp_radius(0.0, 1), 6.0, 1e-9);
  EXPECT_NEAR(sigma0_values(1e4, 0.0, 1).second, 1.0, 1e-4);
}

TEST(Sigma0, SpinOrbitShiftsCusp) {
  EXPECT_LT(cusp_radius(0.65, 1), 6.0);
  EXPECT_GT(cusp_radius(0.65, -1), 6.0);
}

TEST(Sigma0, PointsAreEquilibria) {
  for (int sign : {1, -1})
    for (double r : {3.6, 4.5, 5.0, 8.0, 15.0}) {
      EquilibriumRecord rec;
      try {
        rec = sigma0(r, 0.65, sign);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutsideDomain);
        continue;
      }
      expect_equilibrium(rec);
      EXPECT_NEAR(radial_potential(r, 0.65, rec.params.ell, rec.params.energy, sign), 0.0, 1e-8 * std::pow(r, 6));
      EXPECT_NEAR(radial_potential_dr(r, 0.65, rec.params.ell, rec.params.energy, sign), 0.0, 1e-8 * std::pow(r, 5));
      EXPECT_NEAR(timelike_indicator(rec.state, rec.params), rec.U, 1e-10);
    }
}

TEST(Sigma0, BothSignsCoincideWithoutSpin) {
  for (double r : {4.0, 7.0}) {
    const auto a = sigma0_values(r, 0.0, 1), b = sigma0_values(r, 0.0, -1);
    EXPECT_EQ(a, b);
  }
}

TEST(Sigma0, OutsideDomainRejected) {
  EXPECT_THROW(sigma0(2.5, 0.65, 1), Error);
}

TEST(Sigma0, GeodesicStability) {
  auto stable = sigma0(10.0, 0.0, 1);
  classify(stable);
  EXPECT_EQ(stable.stability, Stability::CenterCenter);
  auto unstable = sigma0(4.0, 0.0, 1);
  classify(unstable);
  EXPECT_EQ(unstable.stability, Stability::SaddleCenter);
}

TEST(Sigma1, MembershipAndEquilibrium) {
  const auto n = sigma1(1.5, 1.0);
  for (const auto& rec : n) {
    EXPECT_NEAR(rec.params.ell, 18.75, 1e-12);
    expect_equilibrium(rec);
    EXPECT_NEAR(rec.U, -rec.z * rec.params.energy, 1e-10);
  }
  const ReducedState img = symmetry_image(n[0].state);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(img.E[k], n[1].state.E[k]);
  EXPECT_NEAR(ell_star(2.0), 8.0 / 9 - 1.5 + 1.5 * std::sqrt(27 + 13 - 32.0 / 27), 1e-12);
  EXPECT_NEAR(ell_star(2.0), 8.7342, 1e-4);
}

TEST(Sigma1, CenterCenterSegmentExists) {
  int centers = 0;
  for (double En = 0.830; En < 0.86; En += 0.0002) {
    std::array<EquilibriumRecord, 2> n;
    try {
      n = sigma1(1.5, En);
    } catch (const Error&) {
      continue;
    }
    classify(n[0]);
    classify(n[1]);
    EXPECT_EQ(n[0].stability, n[1].stability);
    centers += n[0].stability == Stability::CenterCenter;
  }
  EXPECT_GT(centers, 0);
}

TEST(Sigma1, OutsideDomain) { EXPECT_THROW(sigma1(0.65, 0.5), Error); }

TEST(Sigma2, ContinuationFromC2) {
  for (double c : {0.65, 1.0, 1.5}) {
    const Sigma2Curve curve = sigma2(c);
    ASSERT_GT(curve.points.size(), 10u);
    const auto& first = curve.points.front();
    EXPECT_NEAR(first.r, curve.originR, 1e-3);
    EXPECT_NEAR(first.params.energy, curve.origin.params.energy, 1e-3);
    for (const auto& rec : curve.points) {
      EXPECT_EQ(rec.state.E[2], 0.0);
      EXPECT_GT(rec.state.E[0], 0.0);
      const auto res = n2_residuals(rec.r, rec.z, rec.params.energy, c);
      EXPECT_LT(std::abs(res[0]), 1e-10);
      EXPECT_LT(std::abs(res[1]), 1e-10);
      EXPECT_GT(res[2], 0.0);
      EXPECT_LT(equilibrium_residual(rec.state, rec.params), 1e-8);
      // closed-form state at the same (r, z, energy)
      const ReducedState s = n2_state(rec.r, rec.z, rec.params.energy, c, 1);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(s.E[k], rec.state.E[k], 1e-7);
      EXPECT_NEAR(s.Z[0], rec.state.Z[0], 1e-9);
    }
  }
}

TEST(Sigma2, OriginIsOddModeTypeChange) {
  EXPECT_NEAR(c2_point_radius(0.65), 3.490274657, 1e-8);
}

TEST(Classify, C065TypeChanges) {
  // both type-change points exist on Sigma0+ for c = 0.65: C1 at r = 3 and C2
  const double rC2 = c2_point_radius(0.65);
  EXPECT_GT(rC2, 3.0);
  EXPECT_LT(rC2, cusp_radius(0.65, 1));
  auto in = sigma0(0.5 * (rC2 + cusp_radius(0.65, 1)), 0.65, 1);
  classify(in);
  EXPECT_EQ(in.stability, Stability::SaddleCenter);
}

TEST(CriticalSpins, MatchReferenceValues) {
  const CriticalSpins cs = critical_spins();
  EXPECT_NEAR(cs.c1, 0.98878, 2e-3);
  EXPECT_NEAR(cs.c2, 1.3234, 2e-3);
}

TEST(PauliLubanski, FormulaMatchesContraction) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    auto [s, p] = reduce(mpspin::testing::random_tulczyjew(rng), 1.0, 1.0);
    if (i % 2 == 0) s.Pr = 0.0;  // closed-form branch
    const FullState f = lift_to_full(s, p, 0.0, 0.0);
    const auto a = pauli_lubanski(s, p);
    const auto b = pauli_lubanski_full(f, 1.0, 1.0);
    const Vec4 mom = momentum(f, 1.0);
    double dot = 0.0;
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(a[k], b[k], 1e-10 * std::max(1.0, std::abs(b[k])));
      dot += mom[k] * b[k];
    }
    EXPECT_NEAR(dot, 0.0, 1e-10);
  }
}

TEST(PauliLubanski, SymmetricOrbitsSpinAlongTheta) {
  for (int sign : {1, -1}) {
    const auto rec = sigma0(8.0, 0.65, sign);
    const auto S = pauli_lubanski(rec.state, rec.params);
    EXPECT_NEAR(S[1], 0.0, 1e-10);
    EXPECT_NEAR(S[3], 0.0, 1e-10);
    EXPECT_GT(std::abs(S[2]), 1e-3);
  }
  for (const auto& rec : sigma1(1.5, 1.0)) {
    const auto S = pauli_lubanski(rec.state, rec.params);
    EXPECT_NEAR(S[1], 0.0, 1e-10);
    EXPECT_GT(std::abs(S[2]), 1e-3);
    EXPECT_GT(std::abs(S[3]), 1e-3);
  }
  const auto curve = sigma2(0.65);
  const auto S = pauli_lubanski(curve.points[20].state, curve.points[20].params);
  EXPECT_GT(std::abs(S[1]), 1e-3);
  EXPECT_NEAR(S[3], 0.0, 1e-10);
}
