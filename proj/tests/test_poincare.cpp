#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpspin/equilibria.hpp"
#include "mpspin/poincare.hpp"

using namespace mpspin;

namespace {

IntegralParams section_params(double energy) {
  IntegralParams p;
  p.c = 1.0;
  p.ell = 3.807 * 3.807;
  p.energy = energy;
  p.pphi = 1.0;
  return p;
}

IntegratorConfig map_cfg() {
  IntegratorConfig cfg;
  cfg.tauMax = 5e3;
  return cfg;
}

void expect_on_leaf(const ReducedState& s, const IntegralParams& p) {
  EXPECT_EQ(s.E[0], 0.0);
  EXPECT_NEAR(casimir_circ(s), p.c * p.c, 1e-9);
  EXPECT_NEAR(casimir_F(s), p.ell, 1e-9 * p.ell);
  EXPECT_NEAR(mass_squared(s, p), p.m * p.m, 1e-9);
  const auto [fr, fth] = tulczyjew_residuals(s, p);
  EXPECT_LT(std::abs(fr), 1e-9);
  EXPECT_LT(std::abs(fth), 1e-9);
}

}  // namespace

TEST(Lift, ReproducesSymmetricEquilibrium) {
  const EquilibriumRecord rec = sigma0(5.2, 1.0, 1);
  const SectionPoint sp = lift(rec.r, 0.0, rec.params);
  ASSERT_TRUE(sp.admissible);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(sp.state.E[k], rec.state.E[k], 1e-6);
    EXPECT_NEAR(sp.state.Z[k], rec.state.Z[k], 1e-8);
  }
}

TEST(Lift, SatisfiesConstraints) {
  const IntegralParams p = section_params(0.9235);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(3.8, 7.1), up(-0.15, 0.15);
  int admissible = 0;
  for (int i = 0; i < 200; ++i) {
    const SectionPoint sp = lift(ur(rng), up(rng), p);
    if (!sp.admissible) continue;
    ++admissible;
    expect_on_leaf(sp.state, p);
    EXPECT_GT(reduced_rhs(sp.state, p)[0], 0.0);
    EXPECT_LT(timelike_indicator(sp.state, p), 0.0);
  }
  EXPECT_GT(admissible, 20);
}

TEST(Lift, ForbiddenRegionIsGray) {
  const IntegralParams p = section_params(0.92);
  EXPECT_FALSE(lift(10.0, 0.0, p).admissible);
  EXPECT_FALSE(lift(5.2, 0.5, p).admissible);
  EXPECT_FALSE(lift(1.5, 0.0, p).admissible);
  EXPECT_TRUE(lift(5.2, 0.0, p).admissible);
}

TEST(Map, CrossingsLieOnSection) {
  const IntegralParams p = section_params(0.9235);
  const MapOrbit o = iterate_map(lift(4.7, 0.0, p), p, map_cfg(), 20);
  ASSERT_EQ(o.points.size(), 20u);
  double prev = 0.0;
  for (const auto& q : o.points) {
    EXPECT_LT(std::abs(q.state.E[0]), 1e-10);
    EXPECT_GT(reduced_rhs(q.state, p)[0], 0.0);
    EXPECT_GT(q.tau, prev);
    prev = q.tau;
    EXPECT_NEAR(hamiltonian_reduced(q.state, p), hamiltonian_reduced(o.seed.state, p), 1e-9);
  }
}

TEST(Map, BackwardInvertsForward) {
  const IntegralParams p = section_params(0.9235);
  const MapResult f = poincare_map(4.9, 0.01, p, map_cfg());
  ASSERT_TRUE(f.point);
  const MapResult b = poincare_map(f.point->state, p, map_cfg(), -1);
  ASSERT_TRUE(b.point);
  EXPECT_NEAR(b.point->r, 4.9, 1e-8);
  EXPECT_NEAR(b.point->Pr, 0.01, 1e-8);
}

TEST(Map, ReversibleUnderPrFlip) {
  // (r, Pr) -> (r, -Pr) conjugates the map to its inverse
  const IntegralParams p = section_params(0.9235);
  const MapResult f = poincare_map(4.9, 0.01, p, map_cfg());
  ASSERT_TRUE(f.point);
  const MapResult b = poincare_map(f.point->r, -f.point->Pr, p, map_cfg());
  ASSERT_TRUE(b.point);
  EXPECT_NEAR(b.point->r, 4.9, 1e-7);
  EXPECT_NEAR(b.point->Pr, -0.01, 1e-7);
}

TEST(FixedPoint, CentralOrbitIsAreaPreserving) {
  const IntegralParams p = section_params(0.9235);
  const FixedPoint fp = map_fixed_point(5.2, 0.0, p, map_cfg());
  EXPECT_LT(fp.residual, 1e-10);
  const MapResult m = poincare_map(fp.point.state, p, map_cfg());
  ASSERT_TRUE(m.point);
  EXPECT_NEAR(m.point->r, fp.point.r, 1e-9);
  EXPECT_NEAR(m.point->Pr, fp.point.Pr, 1e-9);
  const double det = fp.jacobian[0][0] * fp.jacobian[1][1] - fp.jacobian[0][1] * fp.jacobian[1][0];
  EXPECT_NEAR(det, 1.0, 1e-4);
  EXPECT_FALSE(fp.saddle);
}

TEST(Manifold, LinearSaddle) {
  const PlanarMap f = [](const Point2& x) -> std::optional<Point2> { return Point2{2.0 * x[0], 0.5 * x[1]}; };
  const ManifoldBranch b = grow_manifold(f, {0.0, 0.0}, {1.0, 0.0}, 2.0, 1e-6, 0.05, 2000, 3.0);
  ASSERT_GT(b.points.size(), 10u);
  EXPECT_FALSE(b.terminated);
  double prev = 0.0;
  for (const auto& q : b.points) {
    EXPECT_EQ(q[1], 0.0);
    EXPECT_GT(q[0], prev);
    prev = q[0];
  }
  EXPECT_GT(b.points.back()[0], 3.0);
  for (size_t i = 1; i < b.points.size(); ++i) EXPECT_LE(b.points[i][0] - b.points[i - 1][0], 0.05 + 1e-12);
}

TEST(Manifold, CurvedSaddleStaysOnInvariantCurve) {
  // conjugate of the linear saddle by y -> y - x^2: unstable manifold y = -x^2
  const PlanarMap f = [](const Point2& x) -> std::optional<Point2> {
    const double u = x[0], v = x[1] + x[0] * x[0];
    const double u2 = 2.0 * u, v2 = 0.5 * v;
    return Point2{u2, v2 - u2 * u2};
  };
  const ManifoldBranch b = grow_manifold(f, {0.0, 0.0}, {1.0, 0.0}, 2.0, 1e-7, 0.02, 4000, 2.0);
  for (const auto& q : b.points) EXPECT_NEAR(q[1], -q[0] * q[0], 1e-9);
  EXPECT_GT(b.points.back()[0], 1.0);
}

TEST(Manifold, TerminatesWhenMapUndefined) {
  const PlanarMap f = [](const Point2& x) -> std::optional<Point2> {
    if (x[0] > 1.0) return std::nullopt;
    return Point2{2.0 * x[0], 0.5 * x[1]};
  };
  const ManifoldBranch b = grow_manifold(f, {0.0, 0.0}, {1.0, 0.0}, 2.0, 1e-6, 0.05, 2000, 10.0);
  EXPECT_TRUE(b.terminated);
}

TEST(Polyline, Intersections) {
  const std::vector<Point2> a{{0, 0}, {2, 2}}, b{{0, 2}, {2, 0}}, c{{0, 1}, {1, 2}};
  const auto x = polyline_intersections(a, b);
  ASSERT_EQ(x.size(), 1u);
  EXPECT_DOUBLE_EQ(x[0][0], 1.0);
  EXPECT_DOUBLE_EQ(x[0][1], 1.0);
  EXPECT_TRUE(polyline_intersections(a, c).empty());
}

TEST(Portrait, ParallelMatchesSerial) {
  const IntegralParams p = section_params(0.9235);
  const Window w{4.0, 6.5, -0.05, 0.05};
  const auto seeds = seed_grid(w, 3, 2);
  ASSERT_EQ(seeds.size(), 6u);
  const Portrait a = portrait(seeds, 5, p, map_cfg(), 1);
  const Portrait b = portrait(seeds, 5, p, map_cfg(), 3);
  ASSERT_EQ(a.orbits.size(), b.orbits.size());
  for (size_t i = 0; i < a.orbits.size(); ++i) {
    ASSERT_EQ(a.orbits[i].points.size(), b.orbits[i].points.size());
    for (size_t k = 0; k < a.orbits[i].points.size(); ++k) EXPECT_EQ(a.orbits[i].points[k].r, b.orbits[i].points[k].r);
  }
  const auto mask = gray_mask(w, 5, 5, p, 2);
  EXPECT_EQ(mask.size(), 25u);
}
