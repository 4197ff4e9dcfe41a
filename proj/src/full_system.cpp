#include "mpspin/full_system.hpp"

#include <algorithm>
#include <cmath>

namespace mpspin {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

FullKinematics<double> kinematics(const FullState& s, double mu) {
  require_outside_horizon(s.point.r, mu);
  require_off_axis(s.point.theta);
  const FullVector x = s.pack();
  FullKinematics<double> k;
  full_kinematics(x.data(), mu, k);
  return k;
}

}  // namespace

FullVector FullState::pack() const {
  return {point.t, point.r, point.theta, point.phi, P[0], P[1], P[2], P[3],
          L[0],    L[1],    L[2],        M[0],      M[1], M[2]};
}

FullState FullState::unpack(const FullVector& x) {
  FullState s;
  s.point = {x[0], x[1], x[2], x[3]};
  s.P = {x[4], x[5], x[6], x[7]};
  s.L = {x[8], x[9], x[10]};
  s.M = {x[11], x[12], x[13]};
  return s;
}

FullState make_full_state(const SpacetimePoint& y, const Vec4& P, const Vec3& L, const Vec3& M) {
  FullState s;
  s.point = y;
  s.P = P;
  s.L = L;
  s.M = M;
  return s;
}

SpinTensor spin_tensor(const FullState& s, double mu) {
  const FullKinematics<double> k = kinematics(s, mu);
  SpinTensor out;
  const Vec3& L = s.L;
  const Vec3& M = s.M;
  for (int i = 0; i < 3; ++i) {
    out.sAB[0][i + 1] = M[i];
    out.sAB[i + 1][0] = -M[i];
  }
  out.sAB[1][2] = L[2];
  out.sAB[2][1] = -L[2];
  out.sAB[1][3] = -L[1];
  out.sAB[3][1] = L[1];
  out.sAB[2][3] = L[0];
  out.sAB[3][2] = -L[0];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.sCoord[i][j] = k.S[i][j];
  return out;
}

Vec4 momentum(const FullState& s, double mu) {
  const FullKinematics<double> k = kinematics(s, mu);
  return {k.p[0], k.p[1], k.p[2], k.p[3]};
}

DMatrix d_matrix(const FullState& s, double mu) {
  const FullKinematics<double> k = kinematics(s, mu);
  DMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.D[i][j] = k.D[i][j];
  out.d = k.d;
  return out;
}

Vec4 velocity(const FullState& s, double mu) {
  const FullKinematics<double> k = kinematics(s, mu);
  if (!(k.p2 < 0.0)) fail(ErrorCode::SpacelikeVelocity, "momentum is not time-like");
  const double m2 = -k.p2;
  const double m = std::sqrt(m2);
  const double den = 2.0 * m2 - k.d;
  if (std::abs(den) < 1e-9 * m2) {
    double n = k.p2;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) n -= 0.25 * k.W[i][j] * k.S[i][j];
    if (std::abs(n) < 1e-9 * m2)
      fail(ErrorCode::MassNonConserving, "state lies on the k=0 branch (d = 2m^2, N = 0)");
    fail(ErrorCode::SingularV, "d = 2m^2 singularity of the velocity relation");
  }
  Vec4 u{};
  for (int al = 0; al < 4; ++al) {
    double dp = 0.0;
    for (int be = 0; be < 4; ++be) dp += k.D[al][be] * k.pu[be];
    u[al] = k.pu[al] / m + dp / (m * den);
  }
  double uu = 0.0;
  for (int al = 0; al < 4; ++al) uu += u[al] * u[al] / k.ginv[al];
  if (!(uu < 0.0)) fail(ErrorCode::SpacelikeVelocity, "velocity is not time-like");
  return u;
}

Vec4 tulczyjew_residual(const FullState& s, double mu) {
  const FullKinematics<double> k = kinematics(s, mu);
  Vec4 f{};
  for (int al = 0; al < 4; ++al)
    for (int be = 0; be < 4; ++be) f[al] += k.S[al][be] * k.p[be];
  return f;
}

MPInvariants invariants(const FullState& s, double mu) {
  const FullKinematics<double> k = kinematics(s, mu);
  MPInvariants inv;
  inv.m = std::sqrt(std::max(0.0, -k.p2));
  double c2 = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c2 += 0.5 * k.S[i][j] * k.S[i][j] / (k.ginv[i] * k.ginv[j]);
  inv.c2 = c2;
  inv.d = k.d;
  const Vec4 u = velocity(s, mu);
  double kk = 0.0;
  for (int i = 0; i < 4; ++i) kk -= k.p[i] * u[i];
  inv.k = kk;
  inv.casimirStar = s.L[0] * s.M[0] + s.L[1] * s.M[1] + s.L[2] * s.M[2];
  inv.casimirCirc = s.L[0] * s.L[0] + s.L[1] * s.L[1] + s.L[2] * s.L[2] -
                    (s.M[0] * s.M[0] + s.M[1] * s.M[1] + s.M[2] * s.M[2]);
  return inv;
}

FullConserved conserved(const FullState& s) {
  const double th = s.point.theta, ph = s.point.phi;
  const double st = std::sin(th), ct = std::cos(th);
  if (st == 0.0) fail(ErrorCode::PolarAxis, "sin(theta) = 0");
  const double Pth = s.P[2], Pph = s.P[3], L1 = s.L[0];
  FullConserved c;
  c.energy = -s.P[0];
  const double w = (L1 - Pph * ct) / st;
  c.Q = {std::cos(ph) * w - Pth * std::sin(ph), std::sin(ph) * w + Pth * std::cos(ph), Pph};
  c.F = Pth * Pth + Pph * Pph + w * w;
  return c;
}

double hamiltonian_full(const FullState& s, double m, double mu) {
  require_outside_horizon(s.point.r, mu);
  require_off_axis(s.point.theta);
  const FullVector x = s.pack();
  return hamiltonian_full_t(x.data(), m, mu);
}

FullVector hamiltonian_full_gradient(const FullVector& x, double m, double mu) {
  using D = Dual<kFullDim>;
  std::array<D, kFullDim> xd;
  for (int i = 0; i < kFullDim; ++i) xd[i] = D::variable(x[i], i);
  const D h = hamiltonian_full_t(xd.data(), m, mu);
  FullVector g;
  for (int i = 0; i < kFullDim; ++i) g[i] = h.d[i];
  return g;
}

FullVector hamiltonian_full_gradient_fd(const FullVector& x, double m, double mu) {
  FullVector g{};
  for (int i = 0; i < kFullDim; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    FullVector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (hamiltonian_full_t(xp.data(), m, mu) - hamiltonian_full_t(xm.data(), m, mu)) / (2.0 * h);
  }
  return g;
}

FullVector mp_rhs(const FullVector& x, double m, double mu) {
  require_outside_horizon(x[1], mu);
  const FullVector g = hamiltonian_full_gradient(x, m, mu);
  const Vec3 L{x[8], x[9], x[10]}, M{x[11], x[12], x[13]};
  const Vec3 gL{g[8], g[9], g[10]}, gM{g[11], g[12], g[13]};
  const Vec3 a1 = cross(gL, L), a2 = cross(gM, M);
  const Vec3 b1 = cross(gL, M), b2 = cross(L, gM);
  FullVector out;
  for (int i = 0; i < 4; ++i) {
    out[i] = g[4 + i];
    out[4 + i] = -g[i];
  }
  for (int i = 0; i < 3; ++i) {
    out[8 + i] = a1[i] + a2[i];
    out[11 + i] = b1[i] + b2[i];
  }
  return out;
}

FullState tulczyjew_state(const SpacetimePoint& y, const Vec3& L, const Vec3& pv, double mass,
                          double mu) {
  require_outside_horizon(y.r, mu);
  require_off_axis(y.theta);
  const double p0 = -std::sqrt(mass * mass + pv[0] * pv[0] + pv[1] * pv[1] + pv[2] * pv[2]);
  const Vec3 vxl = cross(pv, L);
  FullState s;
  s.point = y;
  s.L = L;
  s.M = {vxl[0] / p0, vxl[1] / p0, vxl[2] / p0};
  const double a = lapse(y.r, mu), sa = std::sqrt(a);
  const double st = std::sin(y.theta), ct = std::cos(y.theta);
  const Vec4 p{sa * p0, pv[0] / sa, y.r * pv[1], y.r * st * pv[2]};
  s.P = {p[0] + mu / (y.r * y.r) * s.M[0], p[1], p[2] + sa * L[2], p[3] - sa * st * L[1] + ct * L[0]};
  return s;
}

}  // namespace mpspin
