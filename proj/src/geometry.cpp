#include "mpspin/geometry.hpp"

#include <cmath>
#include <sstream>

namespace mpspin {

double lapse(double r, double mu) { return 1.0 - 2.0 * mu / r; }

void require_outside_horizon(double r, double mu) {
  if (!(r > 2.0 * mu)) {
    std::ostringstream os;
    os << "radius " << r << " is not outside the horizon 2mu=" << 2.0 * mu;
    fail(ErrorCode::HorizonDomain, os.str());
  }
}

void require_off_axis(double theta) {
  if (!(std::sin(theta) != 0.0) || !(theta > 0.0 && theta < M_PI)) {
    fail(ErrorCode::PolarAxis, "theta on the polar axis");
  }
}

Vec4 metric_diagonal(double r, double theta, double mu) {
  const double a = lapse(r, mu);
  const double s = std::sin(theta);
  return {-a, 1.0 / a, r * r, r * r * s * s};
}

std::array<double, 6> curvature(const SpacetimePoint& p, double mu) {
  require_outside_horizon(p.r, mu);
  const double s = std::sin(p.theta);
  double out[6];
  curvature_pairs(p.r, s * s, mu, out);
  return {out[0], out[1], out[2], out[3], out[4], out[5]};
}

TetradRotation tetrad_and_rotation(const SpacetimePoint& p, double mu) {
  require_outside_horizon(p.r, mu);
  require_off_axis(p.theta);
  const double r = p.r;
  const double a = lapse(r, mu);
  const double sa = std::sqrt(a);
  const double s = std::sin(p.theta), c = std::cos(p.theta);
  TetradRotation out;
  out.tetrad[0][0] = 1.0 / sa;
  out.tetrad[1][1] = sa;
  out.tetrad[2][2] = 1.0 / r;
  out.tetrad[3][3] = 1.0 / (r * s);
  auto set = [&](int alpha, int A, int B, double v) {
    out.omega[alpha][A][B] = v;
    out.omega[alpha][B][A] = -v;
  };
  set(0, 0, 1, -mu / (r * r));
  set(2, 1, 2, -sa);
  set(3, 1, 3, -sa * s);
  set(3, 2, 3, -c);
  return out;
}

GeometryCache geometry(const SpacetimePoint& p, double mu) {
  require_outside_horizon(p.r, mu);
  require_off_axis(p.theta);
  GeometryCache g;
  const double r = p.r;
  const double a = lapse(r, mu);
  const double s = std::sin(p.theta), c = std::cos(p.theta);
  g.a = a;
  g.b = 1.0 - 2.0 / r;
  g.metric_diag = metric_diagonal(r, p.theta, mu);

  auto gam = [&](int al, int m, int n, double v) {
    g.christoffel[al][m][n] = v;
    g.christoffel[al][n][m] = v;
  };
  gam(0, 0, 1, mu / (r * r * a));
  gam(1, 0, 0, mu * a / (r * r));
  gam(1, 1, 1, -mu / (r * r * a));
  gam(1, 2, 2, -r * a);
  gam(1, 3, 3, -r * a * s * s);
  gam(2, 1, 2, 1.0 / r);
  gam(2, 3, 3, -s * c);
  gam(3, 1, 3, 1.0 / r);
  gam(3, 2, 3, c / s);

  double pairs[6];
  curvature_pairs(r, s * s, mu, pairs);
  for (int k = 0; k < 6; ++k) {
    const int i = kCurvaturePairs[k][0], j = kCurvaturePairs[k][1];
    const double v = pairs[k];
    g.riemann[i][j][i][j] = v;
    g.riemann[j][i][j][i] = v;
    g.riemann[i][j][j][i] = -v;
    g.riemann[j][i][i][j] = -v;
  }

  const TetradRotation tr = tetrad_and_rotation(p, mu);
  g.tetrad = tr.tetrad;
  for (int al = 0; al < 4; ++al)
    for (int A = 0; A < 4; ++A)
      for (int B = 0; B < 4; ++B) g.omega[al][A][B] = tr.omega[al][A][B];
  return g;
}

}  // namespace mpspin
