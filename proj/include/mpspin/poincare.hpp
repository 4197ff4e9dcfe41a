#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "mpspin/integrate.hpp"
#include "mpspin/reduced_system.hpp"

namespace mpspin {

using Point2 = std::array<double, 2>;

struct SectionPoint {
  double r = 0.0;
  double Pr = 0.0;
  bool admissible = false;
  ReducedState state;
  int rootCount = 0;  // admissible roots found by lift
  double tau = 0.0;   // crossing time when produced by the map
};

struct LiftOptions {
  int scanPoints = 2000;
};

// Solves the leaf, Tulczyjew and mass conditions with E1 = 0 for the rest of
// the state.  Inadmissible points come back with admissible = false.
SectionPoint lift(double r, double Pr, const IntegralParams& p, const LiftOptions& opt = {});

// Rhs of the reduced system for fixed integrals.
RhsFn reduced_rhs_fn(const IntegralParams& p);
GuardFn reduced_guard(const IntegralParams& p, const IntegratorConfig& cfg);

struct MapResult {
  std::optional<SectionPoint> point;
  Termination termination;
};

// Next crossing of E1 = 0 with dE1/dtau > 0; timeDirection -1 gives the inverse map.
MapResult poincare_map(const ReducedState& s, const IntegralParams& p, const IntegratorConfig& cfg,
                       int timeDirection = 1);
MapResult poincare_map(double r, double Pr, const IntegralParams& p, const IntegratorConfig& cfg,
                       int timeDirection = 1);

struct MapOrbit {
  SectionPoint seed;
  std::vector<SectionPoint> points;
  Termination termination;
};

MapOrbit iterate_map(const SectionPoint& seed, const IntegralParams& p, const IntegratorConfig& cfg,
                     int iterations);

struct Window {
  double rMin = 0.0, rMax = 0.0, prMin = 0.0, prMax = 0.0;
};

struct GrayCell {
  double r = 0.0;
  double Pr = 0.0;
  bool admissible = false;
};

struct Portrait {
  std::vector<MapOrbit> orbits;
  std::vector<GrayCell> mask;
};

// Uniform seed grid (nr x npr) over the window; seeds that do not lift are
// recorded as empty orbits.  jobs > 1 runs seeds on a thread pool.
std::vector<Point2> seed_grid(const Window& w, int nr, int npr);
std::vector<GrayCell> gray_mask(const Window& w, int nr, int npr, const IntegralParams& p, int jobs = 1);
Portrait portrait(const std::vector<Point2>& seeds, int iterations, const IntegralParams& p,
                  const IntegratorConfig& cfg, int jobs = 1);

struct FixedPoint {
  SectionPoint point;
  std::array<std::complex<double>, 2> multipliers{};
  std::array<std::array<double, 2>, 2> jacobian{};
  int iterations = 0;
  double residual = 0.0;
  bool saddle = false;
  Point2 unstableDir{};
  Point2 stableDir{};
};

struct FixedPointOptions {
  int maxIterations = 50;
  double tol = 1e-10;
  double fdStep = 1e-5;
};

FixedPoint map_fixed_point(double r, double Pr, const IntegralParams& p, const IntegratorConfig& cfg,
                           const FixedPointOptions& opt = {});

// Generic unstable-manifold growth for a planar map with a saddle at x0.
struct ManifoldBranch {
  std::vector<Point2> points;  // ordered by arclength from the saddle
  bool terminated = false;
};
using PlanarMap = std::function<std::optional<Point2>(const Point2&)>;
ManifoldBranch grow_manifold(const PlanarMap& map, const Point2& x0, const Point2& dir, double lambda,
                             double delta, double arcTol, int maxPoints, double maxArc = 1e300);

struct SeparatrixOptions {
  double arcTol = 0.01;
  int maxPoints = 400;
  double delta = 0.0;  // 0 selects 1e-7 * section diameter
  double diameter = 1.0;
  double maxArc = 1e300;
};

// The four branches (unstable +/-, stable +/-) of a saddle of the Poincare map.
struct Separatrices {
  ManifoldBranch unstablePlus, unstableMinus, stablePlus, stableMinus;
};
Separatrices separatrix(const FixedPoint& saddle, const IntegralParams& p, const IntegratorConfig& cfg,
                        const SeparatrixOptions& opt = {});

// Proper intersections between two polylines.
std::vector<Point2> polyline_intersections(const std::vector<Point2>& a, const std::vector<Point2>& b);

struct BifurcationEvent {
  double energy = 0.0;
  bool supercritical = false;
  int countBefore = 0;
  int countAfter = 0;
  FixedPoint central;
  std::vector<FixedPoint> pair;
};

struct BifurcationScan {
  std::vector<double> energies;
  std::vector<FixedPoint> central;  // tracked central fixed point per energy
  std::vector<int> counts;
  std::vector<BifurcationEvent> events;
};

// Continues the fixed point seeded at (r0, Pr0) across [eMin, eMax] and
// reports pitchforks where a multiplier crosses +1.
BifurcationScan bifurcation_scan(double c, double ell, double eMin, double eMax, int steps, double r0,
                                 double pr0, const IntegratorConfig& cfg);

}  // namespace mpspin
