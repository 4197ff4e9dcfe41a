#include "mpspin/poincare.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <thread>

namespace mpspin {

namespace {

struct LiftCandidate {
  ReducedState state;
  double U = 0.0;
};

// Remaining state at E1 = 0 from Z1; false outside the real domain.
bool lift_from_z1(double Z1, double r, double Pr, const IntegralParams& p, ReducedState& s, double& e3sq) {
  const double mu = p.mu, En = p.energy;
  const double a = 1.0 - 2.0 * mu / r;
  const double sa = std::sqrt(a);
  const double k = mu * Z1 / r - En * r;
  if (k == 0.0) return false;
  const double D = 1.0 - Pr * Pr * r * r * a * a / (k * k);
  if (!(D > 0.0)) return false;
  const double Z2 = std::sqrt((p.c * p.c + Z1 * Z1) / D);
  if (!(Z2 > 0.0)) return false;
  const double g = Z1 * k / sa;
  const double G = g / Z2;
  s.E = {0.0, sa * Z2 - G, 0.0};
  s.Z = {Z1, Z2, -Pr * r * a * Z2 / k};
  s.r = r;
  s.Pr = Pr;
  const double w = mu * Z1 - En * r * r;
  e3sq = r * r * (w * w / (r * r * r * (r - 2.0 * mu)) - a * Pr * Pr - p.m * p.m) - G * G;
  return std::isfinite(e3sq);
}

double lift_residual(double Z1, double r, double Pr, const IntegralParams& p) {
  ReducedState s;
  double e3sq;
  if (!lift_from_z1(Z1, r, Pr, p, s, e3sq)) return std::numeric_limits<double>::quiet_NaN();
  return s.E[1] * s.E[1] + e3sq - p.ell;
}

Point2 section_coords(const SectionPoint& s) { return {s.r, s.Pr}; }

}  // namespace

RhsFn reduced_rhs_fn(const IntegralParams& p) {
  return [p](double, const double* y, double* dy) {
    const ReducedVector d = reduced_rhs(ReducedState::unpack(y), p);
    std::copy(d.begin(), d.end(), dy);
  };
}

GuardFn reduced_guard(const IntegralParams& p, const IntegratorConfig& cfg) {
  return radial_guard(6, p.mu, cfg);
}

SectionPoint lift(double r, double Pr, const IntegralParams& p, const LiftOptions& opt) {
  SectionPoint out;
  out.r = r;
  out.Pr = Pr;
  if (!(r - 2.0 * p.mu > 1e-9) || !std::isfinite(Pr)) return out;
  const double En = p.energy;
  const double zmax = 2.0 * (std::abs(En) * r * r + std::sqrt(r * r * r * (r - 2.0 * p.mu))) +
                      10.0 * (p.c + std::sqrt(std::max(p.ell, 0.0))) + 1.0;
  const int n = std::max(opt.scanPoints, 10);
  std::vector<double> roots;
  double zPrev = -zmax, hPrev = lift_residual(zPrev, r, Pr, p);
  for (int i = 1; i <= n; ++i) {
    const double z = -zmax + 2.0 * zmax * i / n;
    const double h = lift_residual(z, r, Pr, p);
    if (std::isfinite(h) && std::isfinite(hPrev) && (h < 0.0) != (hPrev < 0.0)) {
      boost::uintmax_t it = 200;
      auto f = [&](double x) { return lift_residual(x, r, Pr, p); };
      auto stop = [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, std::abs(x)); };
      try {
        const auto br = boost::math::tools::toms748_solve(f, zPrev, z, hPrev, h, stop, it);
        const double root = 0.5 * (br.first + br.second);
        const double hr = f(root);
        if (std::isfinite(hr) && std::abs(hr) < 1e-9 * std::max(1.0, p.ell)) roots.push_back(root);
      } catch (const std::exception&) {
      }
    } else if (h == 0.0) {
      roots.push_back(z);
    }
    zPrev = z;
    hPrev = h;
  }

  std::vector<LiftCandidate> cands;
  const auto rhs = reduced_rhs_fn(p);
  for (double z1 : roots) {
    ReducedState s;
    double e3sq;
    if (!lift_from_z1(z1, r, Pr, p, s, e3sq) || e3sq < -1e-10 * std::max(1.0, p.ell)) continue;
    const double e3 = std::sqrt(std::max(0.0, e3sq));
    for (double sg : {1.0, -1.0}) {
      ReducedState t = s;
      t.E[2] = sg * e3;
      try {
        check_reduced_domain(t, p);
        const ReducedVector d = reduced_rhs(t, p);
        if (!(d[0] > 0.0)) continue;
        const double U = timelike_indicator(t, p);
        if (!(U < 0.0) || !(t.Z[1] > 0.0)) continue;
        cands.push_back({t, U});
      } catch (const Error&) {
      }
      if (e3 == 0.0) break;
    }
  }
  // deduplicate
  std::vector<LiftCandidate> uniq;
  for (const auto& c : cands) {
    bool dup = false;
    for (const auto& u : uniq) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d = std::max({d, std::abs(c.state.E[k] - u.state.E[k]), std::abs(c.state.Z[k] - u.state.Z[k])});
      if (d < 1e-8) dup = true;
    }
    if (!dup) uniq.push_back(c);
  }
  if (uniq.empty()) return out;
  const auto best = std::min_element(uniq.begin(), uniq.end(), [](const LiftCandidate& a, const LiftCandidate& b) {
    const double za = std::abs(a.state.Z[2]), zb = std::abs(b.state.Z[2]);
    if (std::abs(za - zb) > 1e-12 * std::max(1.0, za)) return za < zb;
    return a.state.E[1] > b.state.E[1];
  });
  out.admissible = true;
  out.state = best->state;
  out.rootCount = static_cast<int>(uniq.size());
  return out;
}

MapResult poincare_map(const ReducedState& s, const IntegralParams& p, const IntegratorConfig& cfg,
                       int timeDirection) {
  MapResult res;
  const RhsFn f = reduced_rhs_fn(p);
  ReducedVector x0 = s.pack();
  x0[0] = 0.0;
  auto obs = [&](Dop853& solver) {
    const auto cr = henon_cross(solver, f, 0, 1, cfg);
    if (cr.empty()) return true;
    SectionPoint sp;
    sp.state = ReducedState::unpack(cr.front().state.data());
    sp.r = sp.state.r;
    sp.Pr = sp.state.Pr;
    sp.tau = cr.front().tau;
    sp.admissible = true;
    res.point = sp;
    return false;
  };
  res.termination = integrate(kReducedDim, f, {x0.begin(), x0.end()}, 0.0, cfg, obs, reduced_guard(p, cfg),
                              timeDirection >= 0 ? 1.0 : -1.0);
  if (res.point) res.termination.reason = TerminationReason::Completed;
  return res;
}

MapResult poincare_map(double r, double Pr, const IntegralParams& p, const IntegratorConfig& cfg,
                       int timeDirection) {
  const SectionPoint sp = lift(r, Pr, p);
  if (!sp.admissible) {
    MapResult res;
    res.termination.reason = TerminationReason::Stopped;
    res.termination.message = "lift failed";
    return res;
  }
  return poincare_map(sp.state, p, cfg, timeDirection);
}

MapOrbit iterate_map(const SectionPoint& seed, const IntegralParams& p, const IntegratorConfig& cfg,
                     int iterations) {
  MapOrbit orbit;
  orbit.seed = seed;
  if (!seed.admissible) {
    orbit.termination.reason = TerminationReason::Stopped;
    orbit.termination.message = "seed not admissible";
    return orbit;
  }
  const RhsFn f = reduced_rhs_fn(p);
  ReducedVector x0 = seed.state.pack();
  x0[0] = 0.0;
  auto obs = [&](Dop853& solver) {
    for (const auto& c : henon_cross(solver, f, 0, 1, cfg)) {
      SectionPoint sp;
      sp.state = ReducedState::unpack(c.state.data());
      sp.r = sp.state.r;
      sp.Pr = sp.state.Pr;
      sp.tau = c.tau;
      sp.admissible = true;
      orbit.points.push_back(sp);
      if (static_cast<int>(orbit.points.size()) >= iterations) return false;
    }
    return true;
  };
  orbit.termination = integrate(kReducedDim, f, {x0.begin(), x0.end()}, 0.0, cfg, obs, reduced_guard(p, cfg));
  if (orbit.termination.reason == TerminationReason::Stopped) orbit.termination.reason = TerminationReason::Completed;
  return orbit;
}

namespace {

template <class Fn>
void parallel_for(int n, int jobs, Fn fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<Point2> seed_grid(const Window& w, int nr, int npr) {
  std::vector<Point2> out;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < npr; ++j) {
      const double r = nr == 1 ? 0.5 * (w.rMin + w.rMax) : w.rMin + (w.rMax - w.rMin) * i / (nr - 1);
      const double pr = npr == 1 ? 0.5 * (w.prMin + w.prMax) : w.prMin + (w.prMax - w.prMin) * j / (npr - 1);
      out.push_back({r, pr});
    }
  return out;
}

std::vector<GrayCell> gray_mask(const Window& w, int nr, int npr, const IntegralParams& p, int jobs) {
  const auto grid = seed_grid(w, nr, npr);
  std::vector<GrayCell> out(grid.size());
  parallel_for(static_cast<int>(grid.size()), jobs, [&](int i) {
    out[i] = {grid[i][0], grid[i][1], lift(grid[i][0], grid[i][1], p).admissible};
  });
  return out;
}

Portrait portrait(const std::vector<Point2>& seeds, int iterations, const IntegralParams& p,
                  const IntegratorConfig& cfg, int jobs) {
  Portrait out;
  out.orbits.resize(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), jobs, [&](int i) {
    const SectionPoint sp = lift(seeds[i][0], seeds[i][1], p);
    out.orbits[i] = iterate_map(sp, p, cfg, iterations);
  });
  return out;
}

FixedPoint map_fixed_point(double r, double Pr, const IntegralParams& p, const IntegratorConfig& cfg,
                           const FixedPointOptions& opt) {
  auto F = [&](const Eigen::Vector2d& x, Eigen::Vector2d& out) {
    const MapResult m = poincare_map(x[0], x[1], p, cfg);
    if (!m.point) fail(ErrorCode::NoConvergence, "map undefined near the fixed-point iterate");
    out = Eigen::Vector2d(m.point->r, m.point->Pr);
  };
  auto jac = [&](const Eigen::Vector2d& x) {
    Eigen::Matrix2d J;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d xp = x, xm = x, fp, fm;
      xp[k] += opt.fdStep;
      xm[k] -= opt.fdStep;
      F(xp, fp);
      F(xm, fm);
      J.col(k) = (fp - fm) / (2 * opt.fdStep);
    }
    return J;
  };
  Eigen::Vector2d x(r, Pr), fx;
  FixedPoint out;
  bool converged = false;
  for (int it = 0; it < opt.maxIterations; ++it) {
    F(x, fx);
    const Eigen::Vector2d g = fx - x;
    out.iterations = it;
    out.residual = g.cwiseAbs().maxCoeff();
    if (out.residual < opt.tol) {
      converged = true;
      break;
    }
    const Eigen::Matrix2d J = jac(x) - Eigen::Matrix2d::Identity();
    Eigen::Vector2d dx = J.fullPivLu().solve(-g);
    if (!dx.allFinite()) break;
    // damp large steps
    const double lim = 0.05 * std::max(1.0, std::abs(x[0]));
    if (dx.cwiseAbs().maxCoeff() > lim) dx *= lim / dx.cwiseAbs().maxCoeff();
    x += dx;
  }
  if (!converged) fail(ErrorCode::NoConvergence, "fixed-point Newton did not converge");
  out.point = lift(x[0], x[1], p);
  const Eigen::Matrix2d J = jac(x);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.jacobian[i][j] = J(i, j);
  Eigen::EigenSolver<Eigen::Matrix2d> es(J);
  out.multipliers = {es.eigenvalues()[0], es.eigenvalues()[1]};
  const double l0 = std::abs(out.multipliers[0]), l1 = std::abs(out.multipliers[1]);
  out.saddle = std::abs(out.multipliers[0].imag()) < 1e-12 && std::max(l0, l1) > 1.0 + 1e-6;
  if (out.saddle) {
    const int iu = l0 > l1 ? 0 : 1;
    const Eigen::Vector2d vu = es.eigenvectors().col(iu).real().normalized();
    const Eigen::Vector2d vs = es.eigenvectors().col(1 - iu).real().normalized();
    out.unstableDir = {vu[0], vu[1]};
    out.stableDir = {vs[0], vs[1]};
  }
  return out;
}

ManifoldBranch grow_manifold(const PlanarMap& map, const Point2& x0, const Point2& dir, double lambda,
                             double delta, double arcTol, int maxPoints, double maxArc) {
  // Seeds on the fundamental domain [delta, lambda * delta] along dir; the
  // branch is the union of their images, level by level.
  struct Seed {
    double s;
    std::vector<Point2> images;  // images[k] = map^k(seed)
    bool dead = false;
  };
  const double lam = std::abs(lambda);
  auto seed_point = [&](double s) { return Point2{x0[0] + s * dir[0], x0[1] + s * dir[1]}; };
  auto dist = [](const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };

  // number of levels needed to reach maxArc (or the point budget)
  std::vector<Seed> seeds;
  const int initial = 8;
  for (int i = 0; i <= initial; ++i) seeds.push_back({delta * std::pow(lam, static_cast<double>(i) / initial), {}, false});
  ManifoldBranch out;
  int levels = 1;
  auto extend = [&](Seed& sd, int upto) {
    if (sd.images.empty()) sd.images.push_back(seed_point(sd.s));
    while (!sd.dead && static_cast<int>(sd.images.size()) < upto) {
      const auto nxt = map(sd.images.back());
      if (!nxt) {
        sd.dead = true;
        break;
      }
      sd.images.push_back(*nxt);
    }
  };
  auto total_points = [&] { return static_cast<int>(seeds.size()) * levels; };
  auto arc_length = [&] {
    double a = 0.0;
    Point2 prev = x0;
    for (int k = 0; k < levels; ++k)
      for (auto& sd : seeds) {
        if (static_cast<int>(sd.images.size()) <= k) return a;
        a += dist(prev, sd.images[k]);
        prev = sd.images[k];
      }
    return a;
  };
  for (auto& sd : seeds) extend(sd, levels);
  while (true) {
    bool refined = false;
    // refine gaps on all computed levels
    for (size_t i = 0; i + 1 < seeds.size() && total_points() < maxPoints; ++i) {
      const Seed &a = seeds[i], &b = seeds[i + 1];
      bool gap = false;
      const size_t m = std::min(a.images.size(), b.images.size());
      for (size_t k = 0; k < m; ++k)
        if (dist(a.images[k], b.images[k]) > arcTol) gap = true;
      if (gap && b.s - a.s > 1e-14 * b.s) {
        Seed mid{std::sqrt(a.s * b.s), {}, false};
        extend(mid, levels);
        seeds.insert(seeds.begin() + static_cast<long>(i) + 1, mid);
        refined = true;
        ++i;
      }
    }
    if (refined) continue;
    bool anyDead = false;
    for (const auto& sd : seeds) anyDead = anyDead || sd.dead;
    if (anyDead || total_points() + static_cast<int>(seeds.size()) > maxPoints || arc_length() > maxArc) break;
    ++levels;
    for (auto& sd : seeds) extend(sd, levels);
  }
  // assemble, continuity across levels: last seed of level k ~ first seed of level k+1
  for (int k = 0; k < levels; ++k) {
    for (size_t i = 0; i < seeds.size(); ++i) {
      if (static_cast<int>(seeds[i].images.size()) <= k) {
        out.terminated = true;
        return out;
      }
      if (k > 0 && i == 0) continue;  // duplicate of the previous level's endpoint region
      out.points.push_back(seeds[i].images[k]);
    }
  }
  for (const auto& sd : seeds) out.terminated = out.terminated || sd.dead;
  return out;
}

Separatrices separatrix(const FixedPoint& saddle, const IntegralParams& p, const IntegratorConfig& cfg,
                        const SeparatrixOptions& opt) {
  if (!saddle.saddle) fail(ErrorCode::InvalidArgument, "fixed point is not a saddle");
  double lu = std::abs(saddle.multipliers[0]), ls = std::abs(saddle.multipliers[1]);
  if (lu < ls) std::swap(lu, ls);
  if (!(lu > 1.0 + 1e-6)) fail(ErrorCode::InvalidArgument, "saddle multiplier too close to 1");
  const double delta = opt.delta > 0.0 ? opt.delta : 1e-7 * opt.diameter;
  auto fwd = [&](const Point2& x) -> std::optional<Point2> {
    const MapResult m = poincare_map(x[0], x[1], p, cfg, 1);
    if (!m.point) return std::nullopt;
    return section_coords(*m.point);
  };
  auto bwd = [&](const Point2& x) -> std::optional<Point2> {
    const MapResult m = poincare_map(x[0], x[1], p, cfg, -1);
    if (!m.point) return std::nullopt;
    return section_coords(*m.point);
  };
  const Point2 x0 = section_coords(saddle.point);
  const Point2 u = saddle.unstableDir, s = saddle.stableDir;
  const Point2 um{-u[0], -u[1]}, sm{-s[0], -s[1]};
  // the multiplier sign decides whether branches swap sides each iterate;
  // with a negative multiplier the square of the map keeps each branch
  const bool flip = saddle.multipliers[0].real() * saddle.multipliers[1].real() > 0 &&
                    (saddle.multipliers[0].real() < 0);
  PlanarMap f1 = fwd, b1 = bwd;
  double lamU = lu, lamS = 1.0 / ls;
  if (flip) {
    f1 = [&](const Point2& x) -> std::optional<Point2> {
      auto y = fwd(x);
      return y ? fwd(*y) : std::nullopt;
    };
    b1 = [&](const Point2& x) -> std::optional<Point2> {
      auto y = bwd(x);
      return y ? bwd(*y) : std::nullopt;
    };
    lamU *= lamU;
    lamS *= lamS;
  }
  Separatrices out;
  out.unstablePlus = grow_manifold(f1, x0, u, lamU, delta, opt.arcTol, opt.maxPoints, opt.maxArc);
  out.unstableMinus = grow_manifold(f1, x0, um, lamU, delta, opt.arcTol, opt.maxPoints, opt.maxArc);
  out.stablePlus = grow_manifold(b1, x0, s, lamS, delta, opt.arcTol, opt.maxPoints, opt.maxArc);
  out.stableMinus = grow_manifold(b1, x0, sm, lamS, delta, opt.arcTol, opt.maxPoints, opt.maxArc);
  return out;
}

std::vector<Point2> polyline_intersections(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  std::vector<Point2> out;
  for (size_t i = 0; i + 1 < a.size(); ++i)
    for (size_t j = 0; j + 1 < b.size(); ++j) {
      const double x1 = a[i][0], y1 = a[i][1], x2 = a[i + 1][0], y2 = a[i + 1][1];
      const double x3 = b[j][0], y3 = b[j][1], x4 = b[j + 1][0], y4 = b[j + 1][1];
      const double den = (x2 - x1) * (y4 - y3) - (y2 - y1) * (x4 - x3);
      if (den == 0.0) continue;
      const double t = ((x3 - x1) * (y4 - y3) - (y3 - y1) * (x4 - x3)) / den;
      const double u = ((x3 - x1) * (y2 - y1) - (y3 - y1) * (x2 - x1)) / den;
      if (t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0) out.push_back({x1 + t * (x2 - x1), y1 + t * (y2 - y1)});
    }
  return out;
}

namespace {

double trace_minus_two(const FixedPoint& fp) { return fp.jacobian[0][0] + fp.jacobian[1][1] - 2.0; }

bool is_stable(const FixedPoint& fp) {
  return std::abs(fp.jacobian[0][0] + fp.jacobian[1][1]) < 2.0;
}

// Innermost fixed point on each side of xc along v: a sign change of either
// displacement component gives the Newton start.
std::vector<FixedPoint> find_pair(const Point2& xc, const Point2& v, const IntegralParams& p,
                                  const IntegratorConfig& cfg) {
  const Point2 nrm{-v[1], v[0]};
  auto disp = [&](double t) -> std::optional<Point2> {
    const Point2 y{xc[0] + t * v[0], xc[1] + t * v[1]};
    const MapResult m = poincare_map(y[0], y[1], p, cfg);
    if (!m.point) return std::nullopt;
    const double dr = m.point->r - y[0], dp = m.point->Pr - y[1];
    return Point2{v[0] * dr + v[1] * dp, nrm[0] * dr + nrm[1] * dp};
  };
  std::vector<FixedPoint> out;
  for (double sg : {1.0, -1.0}) {
    double tPrev = 1e-5;
    auto dPrev = disp(sg * tPrev);
    bool found = false;
    for (double t = 1.2e-5; t < 0.1 * std::abs(xc[0]) && !found && dPrev; t *= 1.2) {
      const auto d = disp(sg * t);
      if (!d) break;
      for (int k = 0; k < 2 && !found; ++k) {
        if (((*d)[k] < 0.0) == ((*dPrev)[k] < 0.0)) continue;
        const double tm = sg * 0.5 * (t + tPrev);
        try {
          const FixedPoint q = map_fixed_point(xc[0] + tm * v[0], xc[1] + tm * v[1], p, cfg);
          if (std::hypot(q.point.r - xc[0], q.point.Pr - xc[1]) > 1e-7) {
            out.push_back(q);
            found = true;
          }
        } catch (const Error&) {
        }
      }
      tPrev = t;
      dPrev = d;
    }
  }
  return out;
}

}  // namespace

BifurcationScan bifurcation_scan(double c, double ell, double eMin, double eMax, int steps, double r0,
                                 double pr0, const IntegratorConfig& cfg) {
  BifurcationScan scan;
  IntegralParams p;
  p.c = c;
  p.ell = ell;
  p.pphi = 1.0;
  Point2 x{r0, pr0};
  int count = 1;
  for (int k = 0; k <= steps; ++k) {
    const double E = eMin + (eMax - eMin) * k / std::max(steps, 1);
    p.energy = E;
    const FixedPoint fp = map_fixed_point(x[0], x[1], p, cfg);
    x = section_coords(fp.point);
    if (!scan.central.empty()) {
      const FixedPoint& prev = scan.central.back();
      const double g0 = trace_minus_two(prev), g1 = trace_minus_two(fp);
      if ((g0 < 0.0) != (g1 < 0.0)) {
        // locate by bisection on the multiplier crossing +1
        double lo = scan.energies.back(), hi = E;
        Point2 xl = section_coords(prev.point);
        FixedPoint flo = prev;
        for (int it = 0; it < 30 && hi - lo > 1e-9; ++it) {
          IntegralParams q = p;
          q.energy = 0.5 * (lo + hi);
          const FixedPoint fm = map_fixed_point(xl[0], xl[1], q, cfg);
          if ((trace_minus_two(fm) < 0.0) == (g0 < 0.0)) {
            lo = q.energy;
            flo = fm;
            xl = section_coords(fm.point);
          } else {
            hi = q.energy;
          }
        }
        BifurcationEvent ev;
        ev.energy = 0.5 * (lo + hi);
        ev.central = fp;
        ev.countBefore = count;
        // the new pair sits along the kernel of J - I at the event
        Eigen::Matrix2d J;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) J(i, j) = flo.jacobian[i][j];
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(J - Eigen::Matrix2d::Identity(), Eigen::ComputeFullV);
        const Eigen::Vector2d v = svd.matrixV().col(1);
        ev.pair = find_pair(x, {v[0], v[1]}, p, cfg);
        if (ev.pair.size() == 2) {
          ev.supercritical = is_stable(ev.pair[0]) && is_stable(ev.pair[1]);
          count += 2;
        }
        ev.countAfter = count;
        scan.events.push_back(ev);
      }
    }
    scan.energies.push_back(E);
    scan.central.push_back(fp);
    scan.counts.push_back(count);
  }
  return scan;
}

}  // namespace mpspin
