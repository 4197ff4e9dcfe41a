#include "mpspin/reduced_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mpspin {

namespace {

using D9 = Dual<9>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double pphi_for(const ReducedState& s, const IntegralParams& p) {
  const double f = casimir_F(s);
  const double mag = std::sqrt(f);
  return p.pphi < 0.0 ? -mag : mag;
}

// Corrected closed form of H restricted to E = 0.
template <class T>
T h0_closed(const T* z, const T& r, const T& Pr, const T& En, double m, double mu) {
  const T &Z1 = z[0], &Z2 = z[1], &Z3 = z[2];
  const T a = 1.0 - 2.0 * mu / r;
  const T w = r * r * En - mu * Z1;
  const T m2 = -a * Pr * Pr + w * w / (r * r * r * (r - 2.0 * mu)) - a * Z2 * Z2 / (r * r);
  const T V0 = m2 / mu * r * r * r - 2.0 * Z1 * Z1 - Z2 * Z2 + Z3 * Z3;
  T h = a * (0.5 + (2.0 * Z1 * Z1 + Z2 * Z2) / V0) * Pr * Pr;
  h += Z2 * Z3 * (Z1 - 2.0 * r * En) / (r * V0) * Pr;
  h += Z2 * Z2 / (r * r * r * V0) * (r * a * Z2 * Z2 + mu * Z1 * Z1);
  h -= w * w / (r * r * r * (r - 2.0 * mu)) * (0.5 + (2.0 * Z1 * Z1 - Z3 * Z3) / V0);
  h += Z2 * Z2 / r * (-En * Z1 / V0 + a / (2.0 * r) - a * Z3 * Z3 / (r * V0));
  return h / m;
}

}  // namespace

void check_reduced_domain(const ReducedState& s, const IntegralParams& p) {
  if (!(s.r - 2.0 * p.mu >= 1e-9)) fail(ErrorCode::HorizonDomain, "r reached the horizon");
  if (!(s.Z[1] * s.Z[1] - s.E[0] * s.E[0] >= 1e-12))
    fail(ErrorCode::SingularE1Z2, "E1^2 >= Z2^2 reduction singularity");
  if (!(s.Z[1] != 0.0)) fail(ErrorCode::SingularE1Z2, "Z2 = 0");
  const AuxiliaryTerms aux = auxiliary(s, p);
  if (!(std::abs(aux.V) >= 1e-9)) fail(ErrorCode::SingularV, "V = 0 singularity");
}

AuxiliaryTerms auxiliary(const ReducedState& s, const IntegralParams& p) {
  const ReducedVector v = s.pack();
  const ReducedTerms<double> t = reduced_terms(v.data(), p.energy, p.mu);
  return {t.V, t.Gamma, t.Theta, t.m2};
}

double mass_squared(const ReducedState& s, const IntegralParams& p) { return auxiliary(s, p).m2; }

double casimir_circ(const ReducedState& s) {
  return -s.Z[0] * s.Z[0] + s.Z[1] * s.Z[1] - s.Z[2] * s.Z[2];
}

double casimir_F(const ReducedState& s) {
  return s.E[0] * s.E[0] + s.E[1] * s.E[1] + s.E[2] * s.E[2];
}

std::pair<ReducedState, IntegralParams> reduce(const FullState& full, double m, double mu) {
  const Vec3& L = full.L;
  const Vec3& M = full.M;
  const double th = full.point.theta;
  const double st = std::sin(th);
  if (st == 0.0) fail(ErrorCode::PolarAxis, "sin(theta) = 0");
  const double rho = std::hypot(L[1], L[2]);
  if (!(rho > 0.0)) fail(ErrorCode::ReductionSingularity, "L2 = L3 = 0");
  const double Pth = full.P[2], Pph = full.P[3];
  const double sfac = (L[0] * std::cos(th) - Pph) / st;
  const double nL = std::sqrt(L[0] * L[0] + L[1] * L[1] + L[2] * L[2]);
  ReducedState s;
  s.E = {L[0], (L[2] * Pth + L[1] * sfac) / rho, (-L[1] * Pth + L[2] * sfac) / rho};
  s.Z = {-M[0] * nL / rho, nL, (M[1] * L[2] - M[2] * L[1]) / rho};
  s.r = full.point.r;
  s.Pr = full.P[1];
  IntegralParams p;
  p.m = m;
  p.mu = mu;
  p.c = std::sqrt(std::max(0.0, casimir_circ(s)));
  p.ell = casimir_F(s);
  p.energy = -full.P[0];
  p.pphi = Pph;
  return {s, p};
}

double hamiltonian_reduced(const ReducedState& s, const IntegralParams& p) {
  check_reduced_domain(s, p);
  const ReducedVector v = s.pack();
  return hamiltonian_reduced_t(v.data(), p.energy, p.m, p.mu);
}

ReducedGradient hamiltonian_reduced_gradient(const ReducedState& s, const IntegralParams& p) {
  check_reduced_domain(s, p);
  const ReducedVector v = s.pack();
  std::array<D9, kReducedDim> vd;
  for (int i = 0; i < kReducedDim; ++i) vd[i] = D9::variable(v[i], i);
  const D9 en = D9::variable(p.energy, 8);
  const D9 h = hamiltonian_reduced_t(vd.data(), en, p.m, p.mu);
  ReducedGradient out;
  out.value = h.v;
  for (int i = 0; i < kReducedDim; ++i) out.g[i] = h.d[i];
  out.dEnergy = h.d[8];
  return out;
}

ReducedGradient hamiltonian_reduced_gradient_fd(const ReducedState& s, const IntegralParams& p) {
  check_reduced_domain(s, p);
  const ReducedVector v = s.pack();
  ReducedGradient out;
  out.value = hamiltonian_reduced_t(v.data(), p.energy, p.m, p.mu);
  for (int i = 0; i <= kReducedDim; ++i) {
    const double x = i < kReducedDim ? v[i] : p.energy;
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    ReducedVector vp = v, vm = v;
    double ep = p.energy, em = p.energy;
    if (i < kReducedDim) {
      vp[i] += h;
      vm[i] -= h;
    } else {
      ep += h;
      em -= h;
    }
    const double d = (hamiltonian_reduced_t(vp.data(), ep, p.m, p.mu) -
                      hamiltonian_reduced_t(vm.data(), em, p.m, p.mu)) /
                     (2.0 * h);
    if (i < kReducedDim)
      out.g[i] = d;
    else
      out.dEnergy = d;
  }
  return out;
}

ReducedVector rhs_from_gradient(const ReducedState& s, const ReducedGradient& gr) {
  const Vec3 gE{gr.g[0], gr.g[1], gr.g[2]};
  const Vec3 gZ{gr.g[3], gr.g[4], gr.g[5]};
  const Vec3 JZ{s.Z[0], -s.Z[1], s.Z[2]};
  const Vec3 dE = cross(gE, s.E);
  const Vec3 dZ = cross(gZ, JZ);
  return {dE[0], dE[1], dE[2], dZ[0], dZ[1], dZ[2], gr.g[7], -gr.g[6]};
}

ReducedVector reduced_rhs(const ReducedState& s, const IntegralParams& p) {
  return rhs_from_gradient(s, hamiltonian_reduced_gradient(s, p));
}

std::pair<double, double> tulczyjew_residuals(const ReducedState& s, const IntegralParams& p) {
  if (!(s.Z[1] * s.Z[1] - s.E[0] * s.E[0] >= 0.0))
    fail(ErrorCode::SingularE1Z2, "E1^2 > Z2^2");
  require_outside_horizon(s.r, p.mu);
  const double mu = p.mu, r = s.r, En = p.energy;
  const auto& E = s.E;
  const auto& Z = s.Z;
  const double a = 1.0 - 2.0 * mu / r;
  const double sq = std::sqrt(Z[1] * Z[1] - E[0] * E[0]);
  const double G = std::sqrt(a) * sq - E[1];
  const double Th = Z[0] / Z[1] * sq;
  const double fr = -Th * s.Pr - sq * Z[2] / r +
                    (E[1] * Z[1] * Z[2] - E[0] * Z[0] * E[2]) / (Z[1] * std::sqrt(r * (r - 2.0 * mu)));
  const double fth = En * Th - mu * Th * Th / (r * r) + (G + E[1]) * G / r;
  return {fr, fth};
}

double timelike_indicator(const ReducedState& s, const IntegralParams& p) {
  const ReducedGradient g = hamiltonian_reduced_gradient(s, p);
  const double a = 1.0 - 2.0 * p.mu / s.r;
  const double r2 = s.r * s.r;
  return g.g[7] * g.g[7] / a + r2 * g.g[1] * g.g[1] + r2 * g.g[2] * g.g[2] -
         a * g.dEnergy * g.dEnergy;
}

ReconstructionRates reconstruct_rates(const ReducedState& s, const IntegralParams& p) {
  const double pphi = pphi_for(s, p);
  if (pphi == 0.0 || std::abs(s.E[0]) > std::abs(pphi))
    fail(ErrorCode::InvalidTheta, "|E1| > |P_phi|");
  const ReducedGradient g = hamiltonian_reduced_gradient(s, p);
  ReconstructionRates out;
  out.cosTheta = std::clamp(s.E[0] / pphi, -1.0, 1.0);
  out.theta = std::acos(out.cosTheta);
  const double e23 = s.E[1] * s.E[1] + s.E[2] * s.E[2];
  out.dphi = pphi / e23 * (s.E[1] * g.g[1] + s.E[2] * g.g[2]);
  out.dt = -g.dEnergy;
  return out;
}

FullState lift_to_full(const ReducedState& s, const IntegralParams& p, double phi, double t) {
  const double pphi = pphi_for(s, p);
  const double E1 = s.E[0];
  if (pphi == 0.0 || std::abs(E1) >= std::abs(pphi))
    fail(ErrorCode::InvalidTheta, "cannot place the orbit: |E1| >= |P_phi|");
  const double ct = E1 / pphi;
  const double th = std::acos(ct);
  const double st = std::sin(th);
  const double Z1 = s.Z[0], Z2 = s.Z[1], Z3 = s.Z[2];
  const double rho2 = Z2 * Z2 - E1 * E1;
  if (!(rho2 > 0.0)) fail(ErrorCode::SingularE1Z2, "E1^2 >= Z2^2");
  const double rho = std::sqrt(rho2);
  const double sf = (E1 * ct - pphi) / st;
  FullState f;
  f.point = {t, s.r, th, phi};
  f.L = {E1, rho * s.E[1] / sf, rho * s.E[2] / sf};
  const double M1 = -Z1 * rho / Z2;
  const double L2 = f.L[1], L3 = f.L[2];
  const double b1 = rho * Z3, b2 = -E1 * M1;
  const double det = L3 * L3 + L2 * L2;
  f.M = {M1, (L3 * b1 + L2 * b2) / det, (-L2 * b1 + L3 * b2) / det};
  f.P = {-p.energy, s.Pr, 0.0, pphi};
  return f;
}

ReducedState symmetry_image(const ReducedState& s) {
  ReducedState o = s;
  o.E[0] = -o.E[0];
  o.E[2] = -o.E[2];
  return o;
}

double hamiltonian_q0(const Q0State& s, const IntegralParams& p) {
  require_outside_horizon(s.r, p.mu);
  const double r = s.r, mu = p.mu;
  const double a = 1.0 - 2.0 * mu / r;
  const double w = r * r * p.energy - mu * s.Z[0];
  const double m2 = -a * s.Pr * s.Pr + w * w / (r * r * r * (r - 2.0 * mu)) - a * s.Z[1] * s.Z[1] / (r * r);
  const double V0 = m2 / mu * r * r * r - 2.0 * s.Z[0] * s.Z[0] - s.Z[1] * s.Z[1] + s.Z[2] * s.Z[2];
  if (std::abs(V0) < 1e-9) fail(ErrorCode::SingularV0, "V0 = 0");
  return h0_closed(s.Z.data(), s.r, s.Pr, p.energy, p.m, p.mu);
}

std::pair<double, double> tulczyjew_residuals_q0(const Q0State& s, const IntegralParams& p) {
  const double r = s.r, mu = p.mu;
  const double a = 1.0 - 2.0 * mu / r;
  const auto& Z = s.Z;
  return {Z[0] * s.Pr + Z[1] * Z[2] / r,
          p.energy * Z[0] - mu * Z[0] * Z[0] / (r * r) + a * Z[1] * Z[1] / r};
}

Q0Rates q0_rates(const Q0State& s, const IntegralParams& p, double kappa, double theta,
                 int branchSign) {
  Q0Rates out;
  out.H0 = hamiltonian_q0(s, p);
  using D6 = Dual<6>;
  D6 z[3] = {D6::variable(s.Z[0], 0), D6::variable(s.Z[1], 1), D6::variable(s.Z[2], 2)};
  const D6 h = h0_closed(z, D6::variable(s.r, 3), D6::variable(s.Pr, 4),
                         D6::variable(p.energy, 5), p.m, p.mu);
  const Vec3 gZ{h.d[0], h.d[1], h.d[2]};
  const Vec3 JZ{s.Z[0], -s.Z[1], s.Z[2]};
  out.dZ = cross(gZ, JZ);
  out.dr = h.d[4];
  out.dPr = -h.d[3];
  out.dt = -h.d[5];

  ReducedState rs;
  rs.Z = s.Z;
  rs.r = s.r;
  rs.Pr = s.Pr;
  const ReducedGradient g = hamiltonian_reduced_gradient(rs, p);
  const double st = std::sin(theta);
  out.radicand = 1.0 - kappa * kappa / (st * st);
  const double rt = std::sqrt(std::max(0.0, out.radicand));
  const double sg = branchSign >= 0 ? 1.0 : -1.0;
  out.dtheta = sg * rt * g.g[1] - kappa / st * g.g[2];
  out.dphi = -kappa / (st * st) * g.g[1] - sg / st * rt * g.g[2];
  return out;
}

}  // namespace mpspin
