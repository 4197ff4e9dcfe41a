#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpspin/reduced_system.hpp"
#include "test_support.hpp"

using namespace mpspin;
using mpspin::testing::random_tulczyjew;

namespace {

ReducedVector reduce_vec(const FullVector& x) {
  return reduce(FullState::unpack(x), 1.0, 1.0).first.pack();
}

}  // namespace

TEST(Reduced, HamiltonianAgreesWithFullSystem) {
  std::mt19937_64 rng(21);
  int n = 0;
  for (int i = 0; i < 300; ++i) {
    const FullState f = random_tulczyjew(rng);
    const auto [s, p] = reduce(f, 1.0, 1.0);
    ReducedGradient g;
    try {
      g = hamiltonian_reduced_gradient(s, p);
    } catch (const Error&) {
      continue;
    }
    ++n;
    EXPECT_NEAR(g.value, hamiltonian_full(f, 1.0, 1.0), 1e-10);
    EXPECT_NEAR(s.E[0], f.L[0], 1e-15);
    EXPECT_NEAR(mass_squared(s, p), 1.0, 1e-10);
    const FullConserved c = conserved(f);
    EXPECT_NEAR(casimir_F(s), c.F, 1e-9 * std::max(1.0, c.F));
    const MPInvariants inv = invariants(f, 1.0);
    EXPECT_NEAR(casimir_circ(s), inv.casimirCirc, 1e-10 * std::max(1.0, std::abs(inv.casimirCirc)));
    const auto [fr, fth] = tulczyjew_residuals(s, p);
    EXPECT_NEAR(fr, 0.0, 1e-10);
    EXPECT_NEAR(fth, 0.0, 1e-10);
    EXPECT_LT(timelike_indicator(s, p), 0.0);
  }
  EXPECT_GT(n, 250);
}

TEST(Reduced, FlowIsReductionOfFullFlow) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 30; ++it) {
    const FullState f = random_tulczyjew(rng);
    const FullVector x = f.pack();
    const auto [s, p] = reduce(f, 1.0, 1.0);
    const ReducedVector rr = reduced_rhs(s, p);
    const FullVector fr = mp_rhs(x, 1.0, 1.0);
    ReducedVector chain{};
    for (int k = 0; k < kFullDim; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      FullVector xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const ReducedVector a = reduce_vec(xp), b = reduce_vec(xm);
      for (int j = 0; j < kReducedDim; ++j) chain[j] += (a[j] - b[j]) / (2 * h) * fr[k];
    }
    for (int j = 0; j < kReducedDim; ++j)
      EXPECT_NEAR(rr[j], chain[j], 1e-6 * std::max(1.0, std::abs(chain[j]))) << "component " << j;
    // t and phi rates in the frame with Q along the polar axis
    const FullState aligned = lift_to_full(s, p, 0.0, 0.0);
    const FullVector fa = mp_rhs(aligned.pack(), 1.0, 1.0);
    const ReconstructionRates rec = reconstruct_rates(s, p);
    EXPECT_NEAR(rec.theta, aligned.point.theta, 1e-14);
    EXPECT_NEAR(rec.dt, fa[0], 1e-9 * std::abs(fa[0]));
    EXPECT_NEAR(rec.dphi, fa[3], 1e-9 * std::max(1.0, std::abs(fa[3])));
  }
}

TEST(Reduced, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  int n = 0;
  while (n < 200) {
    const FullState f = random_tulczyjew(rng);
    const auto [s, p] = reduce(f, 1.0, 1.0);
    ReducedGradient g, gf;
    try {
      g = hamiltonian_reduced_gradient(s, p);
      gf = hamiltonian_reduced_gradient_fd(s, p);
    } catch (const Error&) {
      continue;
    }
    ++n;
    for (int k = 0; k < kReducedDim; ++k)
      ASSERT_NEAR(g.g[k], gf.g[k], 1e-6 * std::max(1.0, std::abs(g.g[k])));
    ASSERT_NEAR(g.dEnergy, gf.dEnergy, 1e-6 * std::max(1.0, std::abs(g.dEnergy)));
  }
}

TEST(Reduced, FlowPreservesCasimirs) {
  std::mt19937_64 rng(24);
  for (int it = 0; it < 30; ++it) {
    const auto [s, p] = reduce(random_tulczyjew(rng), 1.0, 1.0);
    const ReducedVector d = reduced_rhs(s, p);
    const double dF = 2 * (s.E[0] * d[0] + s.E[1] * d[1] + s.E[2] * d[2]);
    const double dC = 2 * (-s.Z[0] * d[3] + s.Z[1] * d[4] - s.Z[2] * d[5]);
    EXPECT_NEAR(dF, 0.0, 1e-11);
    EXPECT_NEAR(dC, 0.0, 1e-11);
  }
}

TEST(Reduced, LiftRoundTrip) {
  std::mt19937_64 rng(25);
  for (int it = 0; it < 50; ++it) {
    const auto [s, p] = reduce(random_tulczyjew(rng), 1.0, 1.0);
    const FullState f = lift_to_full(s, p, 0.7, 1.5);
    EXPECT_NEAR(f.P[2], 0.0, 0.0);
    const auto [s2, p2] = reduce(f, 1.0, 1.0);
    const ReducedVector a = s.pack(), b = s2.pack();
    for (int k = 0; k < kReducedDim; ++k) EXPECT_NEAR(a[k], b[k], 1e-10 * std::max(1.0, std::abs(a[k])));
    EXPECT_NEAR(p2.energy, p.energy, 1e-14);
    EXPECT_NEAR(hamiltonian_full(f, 1.0, 1.0), -0.5, 1e-10);
    for (double v : tulczyjew_residual(f, 1.0)) EXPECT_NEAR(v, 0.0, 1e-10);
  }
}

TEST(Reduced, SymmetryIsReversible) {
  std::mt19937_64 rng(26);
  for (int it = 0; it < 20; ++it) {
    const auto [s, p] = reduce(random_tulczyjew(rng), 1.0, 1.0);
    const ReducedState t = symmetry_image(s);
    EXPECT_NEAR(hamiltonian_reduced(t, p), hamiltonian_reduced(s, p), 1e-12);
    const ReducedVector a = reduced_rhs(s, p), b = reduced_rhs(t, p);
    EXPECT_NEAR(b[6], a[6], 1e-10 * std::max(1.0, std::abs(a[6])));
    EXPECT_NEAR(b[0], -a[0], 1e-10 * std::max(1.0, std::abs(a[0])));
  }
}

TEST(Reduced, ZeroAngularMomentumBranch) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    Q0State q;
    q.Z = {u(rng), 1.5 + u(rng), 0.5 * u(rng)};
    q.r = 6.0 + 3.0 * u(rng);
    q.Pr = 0.1 * u(rng);
    IntegralParams p;
    p.energy = 0.95 + 0.03 * u(rng);
    ReducedState s;
    s.Z = q.Z;
    s.r = q.r;
    s.Pr = q.Pr;
    double hr;
    try {
      hr = hamiltonian_reduced(s, p);
    } catch (const Error&) {
      continue;
    }
    EXPECT_NEAR(hamiltonian_q0(q, p), hr, 1e-11 * std::max(1.0, std::abs(hr)));
    const ReducedVector d = reduced_rhs(s, p);
    const Q0Rates r0 = q0_rates(q, p, 0.0, M_PI / 2, 1);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r0.dZ[k], d[3 + k], 1e-9 * std::max(1.0, std::abs(d[3 + k])));
    EXPECT_NEAR(r0.dr, d[6], 1e-9 * std::max(1.0, std::abs(d[6])));
    EXPECT_NEAR(r0.dPr, d[7], 1e-9 * std::max(1.0, std::abs(d[7])));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(d[k], 0.0);
  }
}

TEST(Reduced, ZeroAngularMomentumFromFullState) {
  // Equatorial radial infall with spin along theta: Q vanishes.
  const FullState f = tulczyjew_state({0, 9.0, M_PI / 2, 0}, {0.0, 0.0, 0.0}, {0.1, 0.0, 0.0}, 1.0, 1.0);
  const FullConserved c = conserved(f);
  EXPECT_NEAR(c.F, 0.0, 1e-14);
}

TEST(Reduced, DomainErrors) {
  ReducedState s;
  s.Z = {0.1, 0.5, 0.0};
  s.E = {0.6, 0.1, 0.1};
  s.r = 8.0;
  IntegralParams p;
  p.energy = 0.95;
  EXPECT_THROW(
      {
        try {
          hamiltonian_reduced(s, p);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::SingularE1Z2);
          throw;
        }
      },
      Error);
  s.E = {0.1, 0.1, 0.1};
  s.r = 1.9;
  EXPECT_THROW(hamiltonian_reduced(s, p), Error);
}
