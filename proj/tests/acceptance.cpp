// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mpspin/equilibria.hpp"
#include "mpspin/full_system.hpp"
#include "mpspin/integrate.hpp"
#include "mpspin/poincare.hpp"
#include "mpspin/reduced_system.hpp"
#include "test_support.hpp"

using namespace mpspin;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double inf_norm(const ReducedVector& v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

// shared between the section criteria
struct SectionRun {
  IntegralParams params;
  MapOrbit orbit;
};
std::vector<SectionRun> gOrbits;
std::vector<FixedPoint> gFixedPoints;
BifurcationScan gScan;
const double kEllSection = 3.807 * 3.807;

IntegralParams section_params(double c, double ell, double energy) {
  IntegralParams p;
  p.c = c;
  p.ell = ell;
  p.energy = energy;
  p.pphi = 1.0;
  return p;
}

IntegratorConfig section_cfg() {
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  cfg.tauMax = 5e3;
  return cfg;
}

Outcome c1_d_identity() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) worst = std::max(worst, testing::d_identity_residual(d_matrix(testing::random_cstar0(rng), 1.0)));
  return {worst < 1e-10, fmt("max residual %.3g over 1000 states", worst)};
}

Outcome c2_conservation() {
  const IntegralParams p = section_params(1.4, 16.0, 0.92292941);
  const SectionPoint seed = lift(6.0, 0.0, p);
  if (!seed.admissible) return {false, "seed (6, 0) does not lift"};
  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-12;
  cfg.tauMax = 1e4;
  auto invs = [&](const double* y) {
    const ReducedState s = ReducedState::unpack(y);
    const auto [fr, fth] = tulczyjew_residuals(s, p);
    return std::array<double, 6>{hamiltonian_reduced(s, p), casimir_circ(s), casimir_F(s),
                                 std::sqrt(mass_squared(s, p)), fr, fth};
  };
  const ReducedVector y0 = seed.state.pack();
  const auto ref = invs(y0.data());
  std::array<double, 6> drift{};
  const Termination t = integrate(
      kReducedDim, reduced_rhs_fn(p), std::vector<double>(y0.begin(), y0.end()), 0.0, cfg,
      [&](Dop853& s) {
        const auto v = invs(s.y().data());
        for (int k = 0; k < 6; ++k) drift[k] = std::max(drift[k], std::abs(v[k] - ref[k]));
        return true;
      },
      reduced_guard(p, cfg));
  // crossings of the same orbit for the Henon check
  const MapOrbit orbit = iterate_map(seed, p, section_cfg(), 60);
  gOrbits.push_back({p, orbit});
  const double worst = *std::max_element(drift.begin(), drift.end());
  const bool ok = t.reason == TerminationReason::Completed && std::abs(t.tau - 1e4) < 1e-9 && worst < 1e-8;
  return {ok, std::string(termination_name(t.reason)) +
                  fmt(" at tau %.6g; drift H %.2g C %.2g F %.2g", t.tau, drift[0], drift[1], drift[2]) +
                  fmt(" m %.2g f_r %.2g f_th %.2g", drift[3], drift[4], drift[5])};
}

Outcome c3_equivalence() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> ur(7.0, 20.0), ut(0.6, 2.5), uph(0.0, 6.0);
  std::normal_distribution<double> nd;
  IntegratorConfig cfg;
  cfg.tauMax = 1e3;
  double worst = 0.0, covered = 1e300;
  int done = 0, attempts = 0, plunges = 0;
  while (done < 10 && attempts < 200) {
    ++attempts;
    // moderate spin, momentum near the circular value
    const double r = ur(rng);
    const SpacetimePoint y0{0.0, r, ut(rng), uph(rng)};
    const Vec3 L{0.3 * nd(rng), 0.3 * nd(rng), 0.3 * nd(rng)};
    const Vec3 pv{0.05 * nd(rng), 0.05 * nd(rng), std::sqrt(1.0 / (r - 3.0)) * (1.0 + 0.05 * nd(rng))};
    const FullState f = tulczyjew_state(y0, L, pv, 1.0, 1.0);
    const auto [s, p] = reduce(f, 1.0, 1.0);
    try {
      reduced_rhs(s, p);
    } catch (const Error&) {
      continue;
    }
    const FullVector x = f.pack();
    const ReducedVector y = s.pack();
    const Trajectory a = integrate_dense(
        kFullDim, [](double, const double* v, double* dv) {
          FullVector xv;
          std::copy(v, v + kFullDim, xv.begin());
          const FullVector r = mp_rhs(xv, 1.0, 1.0);
          std::copy(r.begin(), r.end(), dv);
        },
        std::vector<double>(x.begin(), x.end()), 0.0, 1.0, cfg, radial_guard(1, 1.0, cfg));
    const Trajectory b = integrate_dense(kReducedDim, reduced_rhs_fn(p), std::vector<double>(y.begin(), y.end()),
                                         0.0, 1.0, cfg, reduced_guard(p, cfg));
    const size_t n = std::min(a.tau.size(), b.tau.size());
    for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a.states[i][1] - b.states[i][6]));
    if (a.termination.reason != b.termination.reason) worst = std::max(worst, 1.0);
    plunges += a.termination.reason == TerminationReason::HorizonReached;
    covered = std::min(covered, n ? a.tau[n - 1] : 0.0);
    ++done;
  }
  return {done == 10 && worst < 1e-6,
          fmt("%g states (%g plunge), max |r_full - r_red| %.3g, shortest span tau %.4g", done, plunges, worst, covered)};
}

Outcome c4_geodesic() {
  const double r = cusp_radius(0.0, 1);
  const double e = sigma0_values(r, 0.0, 1).second;
  return {std::abs(r - 6.0) < 1e-6 && std::abs(e - 0.942809) < 1e-6, fmt("r %.12g, energy %.9g", r, e)};
}

Outcome c5_critical() {
  const CriticalSpins cs = critical_spins();
  return {std::abs(cs.c1 - 0.98878) < 2e-3 && std::abs(cs.c2 - 1.3234) < 2e-3, fmt("c1 %.6f, c2 %.6f", cs.c1, cs.c2)};
}

Outcome c6_sigma1() {
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> uc(0.05, 2.0), ue(0.8, 1.2);
  int n = 0, tries = 0;
  double worstId = 0.0, worstRhs = 0.0;
  while (n < 100 && tries < 100000) {
    ++tries;
    const double c = uc(rng), e = ue(rng);
    std::array<EquilibriumRecord, 2> pts;
    try {
      pts = sigma1(c, e);
    } catch (const Error&) {
      continue;
    }
    for (const auto& rec : pts) {
      if (n >= 100) break;
      const auto& q = rec.params;
      worstId = std::max(worstId, std::abs(q.c * q.c / 3.0 + 27.0 * q.energy * q.energy - q.ell - 9.0));
      worstRhs = std::max(worstRhs, inf_norm(reduced_rhs(rec.state, q)));
      ++n;
    }
  }
  return {n == 100 && worstId < 1e-12 && worstRhs < 1e-8,
          fmt("%g points, identity %.3g, |rhs| %.3g", n, worstId, worstRhs)};
}

Outcome c7_sigma2() {
  bool ok = true;
  std::string detail;
  for (double c : {0.65, 1.0, 1.5}) {
    const Sigma2Curve curve = sigma2(c);
    double res = 0.0, rhs = 0.0;
    for (const auto& rec : curve.points) {
      const auto e = n2_residuals(rec.r, rec.z, rec.params.energy, c);
      res = std::max({res, std::abs(e[0]), std::abs(e[1])});
      rhs = std::max(rhs, inf_norm(reduced_rhs(rec.state, rec.params)));
      ok = ok && e[2] > 0.0 && rec.state.E[2] == 0.0 && rec.state.E[0] != 0.0;
    }
    // extrapolate the first two points to E1 = 0 (quadratic in E1) and compare with the origin
    const auto &p0 = curve.points.at(0), &p1 = curve.points.at(1);
    const double a0 = p0.state.E[0] * p0.state.E[0], a1 = p1.state.E[0] * p1.state.E[0];
    auto extra = [&](double v0, double v1) { return v0 - a0 * (v1 - v0) / (a1 - a0); };
    const double dr = std::abs(extra(p0.r, p1.r) - curve.origin.r);
    const double dz = std::abs(extra(p0.z, p1.z) - curve.origin.state.Z[1]);
    const double de = std::abs(extra(p0.params.energy, p1.params.energy) - curve.origin.params.energy);
    const double originRhs = inf_norm(reduced_rhs(curve.origin.state, curve.origin.params));
    const double originGap = std::max({dr, dz, de});
    ok = ok && res < 1e-10 && rhs < 1e-8 && curve.origin.state.E[0] == 0.0 && originRhs < 1e-8 && originGap < 1e-5;
    detail += fmt("c=%.2f: eq %.2g rhs %.2g origin gap %.2g; ", c, res, rhs, originGap);
  }
  return {ok, detail};
}

Outcome c8_spin() {
  const double tol = 1e-10;
  bool s0 = true, n1 = true, n2 = true;
  double n2Theta = 0.0;
  for (double c : {0.3, 0.65, 1.0, 1.5})
    for (int sign : {1, -1})
      for (double r : {4.0, 6.5, 12.0}) {
        EquilibriumRecord rec;
        try {
          rec = sigma0(r, c, sign);
        } catch (const Error&) {
          continue;
        }
        const auto S = pauli_lubanski(rec.state, rec.params);
        s0 = s0 && std::abs(S[1]) < tol && std::abs(S[3]) < tol && std::abs(S[2]) > tol;
      }
  for (double c : {0.65, 1.0, 1.5})
    for (double e : {0.95, 1.0, 1.1}) {
      std::array<EquilibriumRecord, 2> pts;
      try {
        pts = sigma1(c, e);
      } catch (const Error&) {
        continue;
      }
      for (const auto& rec : pts) {
        const auto S = pauli_lubanski(rec.state, rec.params);
        n1 = n1 && std::abs(S[1]) < tol && std::abs(S[2]) > tol && std::abs(S[3]) > tol;
      }
    }
  for (double c : {0.65, 1.0, 1.5}) {
    const Sigma2Curve curve = sigma2(c);
    for (size_t i = 0; i < curve.points.size(); i += 25)
      for (int img = 0; img < 2; ++img) {
        const ReducedState st = img ? symmetry_image(curve.points[i].state) : curve.points[i].state;
        const auto S = pauli_lubanski(st, curve.points[i].params);
        n2Theta = std::max(n2Theta, std::abs(S[2]));
        n2 = n2 && std::abs(S[2]) < tol && std::abs(S[3]) < tol && std::abs(S[1]) > tol;
      }
  }
  return {s0 && n1 && n2, std::string("Sigma0 ") + (s0 ? "ok" : "fail") + ", N1 " + (n1 ? "ok" : "fail") + ", N2 " +
                              (n2 ? "ok" : "fail") + fmt(" (max |S^theta| on N2 = %.3g)", n2Theta)};
}

Outcome c9_pitchfork() {
  // the well bottom lies at energy 0.9193; no fixed point exists below it
  gScan = bifurcation_scan(1.0, kEllSection, 0.9195, 0.9235, 40, 5.2, 0.0, section_cfg());
  for (const auto& fp : gScan.central) gFixedPoints.push_back(fp);
  std::vector<int> seq;
  for (int n : gScan.counts)
    if (seq.empty() || seq.back() != n) seq.push_back(n);
  std::string s;
  for (int n : seq) s += (s.empty() ? "" : "->") + std::to_string(n);
  for (const auto& ev : gScan.events)
    for (const auto& fp : ev.pair) gFixedPoints.push_back(fp);
  const auto& ev = gScan.events;
  const bool ok = seq == std::vector<int>{1, 3, 5} && ev.size() == 2 && ev[0].supercritical && !ev[1].supercritical;
  std::string kinds;
  for (const auto& e : ev) kinds += fmt(" %.8f", e.energy) + (e.supercritical ? " super" : " sub");
  return {ok, "counts " + s + ";" + kinds};
}

double segment_sine(const std::vector<Point2>& a, const std::vector<Point2>& b, const Point2& x) {
  auto seg = [&](const std::vector<Point2>& poly) {
    size_t best = 0;
    double bd = 1e300;
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
      const double dx = poly[i + 1][0] - poly[i][0], dy = poly[i + 1][1] - poly[i][1];
      const double L2 = dx * dx + dy * dy;
      double t = L2 > 0 ? ((x[0] - poly[i][0]) * dx + (x[1] - poly[i][1]) * dy) / L2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double d = std::hypot(poly[i][0] + t * dx - x[0], poly[i][1] + t * dy - x[1]);
      if (d < bd) bd = d, best = i;
    }
    const double dx = poly[best + 1][0] - poly[best][0], dy = poly[best + 1][1] - poly[best][1];
    const double L = std::hypot(dx, dy);
    return Point2{dx / L, dy / L};
  };
  const Point2 u = seg(a), v = seg(b);
  return std::abs(u[0] * v[1] - u[1] * v[0]);
}

Outcome c10_heteroclinic() {
  if (gScan.events.size() < 2 || gScan.events[1].pair.size() != 2) return {false, "no saddle pair from the pitchfork scan"};
  const IntegratorConfig cfg = section_cfg();
  // continue the subcritical pair from its birth energy to 0.9235
  std::vector<FixedPoint> saddles = gScan.events[1].pair;
  const double e0 = gScan.events[1].energy + 1e-4, e1 = 0.9235;
  const int steps = 26;
  try {
    for (int k = 0; k <= steps; ++k) {
      const double e = e0 + (e1 - e0) * k / steps;
      for (auto& s : saddles) s = map_fixed_point(s.point.r, s.point.Pr, section_params(1.0, kEllSection, e), cfg);
    }
  } catch (const Error& err) {
    return {false, std::string("saddle continuation failed: ") + err.what()};
  }
  for (const auto& s : saddles) gFixedPoints.push_back(s);
  if (!saddles[0].saddle || !saddles[1].saddle) return {false, "continued points are not saddles"};
  SeparatrixOptions opt;
  opt.arcTol = 0.02;
  opt.maxPoints = 3000;
  opt.diameter = 3.4;
  const IntegralParams p = section_params(1.0, kEllSection, e1);
  const Separatrices A = separatrix(saddles[0], p, cfg, opt), B = separatrix(saddles[1], p, cfg, opt);
  int count = 0;
  double bestSine = 0.0;
  auto test = [&](const ManifoldBranch& u, const ManifoldBranch& s) {
    for (const auto& x : polyline_intersections(u.points, s.points)) {
      ++count;
      bestSine = std::max(bestSine, segment_sine(u.points, s.points, x));
    }
  };
  for (const auto* u : {&A.unstablePlus, &A.unstableMinus})
    for (const auto* s : {&B.stablePlus, &B.stableMinus}) test(*u, *s);
  for (const auto* u : {&B.unstablePlus, &B.unstableMinus})
    for (const auto* s : {&A.stablePlus, &A.stableMinus}) test(*u, *s);
  return {count > 0 && bestSine > 1e-2,
          fmt("saddles (%.6f, %.2g) and (%.6f, %.2g); ", saddles[0].point.r, saddles[0].point.Pr, saddles[1].point.r,
              saddles[1].point.Pr) +
              fmt("%g unstable/stable intersections, max sine %.3g", count, bestSine)};
}

// Re-integrates each interval between consecutive crossings in plain time and
// evaluates E1 where the interval ends.
double crossing_error(const SectionRun& run) {
  IntegratorConfig cfg;
  cfg.rtol = 1e-13;
  cfg.atol = 1e-14;
  double worst = 0.0, tPrev = 0.0;
  ReducedVector x = run.orbit.seed.state.pack();
  for (const auto& pt : run.orbit.points) {
    cfg.tauMax = pt.tau - tPrev;
    const Termination t = integrate(kReducedDim, reduced_rhs_fn(run.params), std::vector<double>(x.begin(), x.end()),
                                    0.0, cfg);
    if (t.reason != TerminationReason::Completed) return 1.0;
    worst = std::max(worst, std::abs(t.finalState[0]));
    x = pt.state.pack();
    tPrev = pt.tau;
  }
  return worst;
}

Outcome c11_henon() {
  // extra orbits between the two pitchforks
  const IntegralParams p = section_params(1.0, kEllSection, 0.9209);
  const Portrait pt = portrait(seed_grid(Window{4.5, 6.2, -0.05, 0.05}, 4, 2), 40, p, section_cfg());
  for (const auto& o : pt.orbits)
    if (!o.points.empty()) gOrbits.push_back({p, o});
  double worstE1 = 0.0;
  size_t crossings = 0;
  for (const auto& run : gOrbits) {
    worstE1 = std::max(worstE1, crossing_error(run));
    crossings += run.orbit.points.size();
  }
  double worstDet = 0.0;
  for (const auto& fp : gFixedPoints) {
    const std::complex<double> prod = fp.multipliers[0] * fp.multipliers[1];
    worstDet = std::max(worstDet, std::abs(prod - 1.0));
  }
  return {crossings > 0 && !gFixedPoints.empty() && worstE1 < 1e-10 && worstDet < 1e-4,
          fmt("%g crossings, max |E1| %.3g; %g fixed points, max |mu1 mu2 - 1| %.3g", crossings, worstE1,
              gFixedPoints.size(), worstDet)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"D-matrix identity", c1_d_identity},
      {"conservation (reduced system)", c2_conservation},
      {"full/reduced equivalence", c3_equivalence},
      {"geodesic limit", c4_geodesic},
      {"critical spins", c5_critical},
      {"Sigma1 identity", c6_sigma1},
      {"Sigma2 equilibria", c7_sigma2},
      {"spin-direction signatures", c8_spin},
      {"pitchfork sequence", c9_pitchfork},
      {"heteroclinic intersection", c10_heteroclinic},
      {"Henon accuracy", c11_henon},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
