#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "mpspin/full_system.hpp"

namespace mpspin {

inline constexpr int kReducedDim = 8;
using ReducedVector = std::array<double, kReducedDim>;

// Packed layout: E1 E2 E3 | Z1 Z2 Z3 | r Pr
struct ReducedState {
  Vec3 E{};
  Vec3 Z{};
  double r = 0.0;
  double Pr = 0.0;

  ReducedVector pack() const { return {E[0], E[1], E[2], Z[0], Z[1], Z[2], r, Pr}; }
  static ReducedState unpack(const double* v) {
    ReducedState s;
    s.E = {v[0], v[1], v[2]};
    s.Z = {v[3], v[4], v[5]};
    s.r = v[6];
    s.Pr = v[7];
    return s;
  }
};

struct IntegralParams {
  double m = 1.0;
  double mu = 1.0;
  double c = 0.0;
  double ell = 0.0;
  double energy = 0.0;
  double pphi = 0.0;
};

struct AuxiliaryTerms {
  double V = 0.0;
  double Gamma = 0.0;
  double Theta = 0.0;
  double m2 = 0.0;
};

template <class T>
struct ReducedTerms {
  T a, sq, Gamma, Theta, m2, V;
};

template <class T>
ReducedTerms<T> reduced_terms(const T* v, const T& En, double mu) {
  using std::sqrt;
  const T &E1 = v[0], &E3 = v[2], &Z1 = v[3], &Z2 = v[4], &Z3 = v[5], &r = v[6], &Pr = v[7];
  ReducedTerms<T> t;
  t.a = 1.0 - 2.0 * mu / r;
  t.sq = sqrt(Z2 * Z2 - E1 * E1);
  t.Gamma = sqrt(t.a) * t.sq - v[1];
  t.Theta = Z1 / Z2 * t.sq;
  const T w = mu * t.Theta - En * r * r;
  t.m2 = -t.a * Pr * Pr + w * w / (r * r * r * (r - 2.0 * mu)) - (E3 * E3 + t.Gamma * t.Gamma) / (r * r);
  t.V = t.m2 / mu * r * r * r - 2.0 * Z1 * Z1 - Z2 * Z2 + Z3 * Z3 +
        3.0 * E1 * E1 * (1.0 + Z1 * Z1 / (Z2 * Z2));
  return t;
}

template <class T>
T hamiltonian_reduced_t(const T* v, const T& En, double m, double mu) {
  using std::sqrt;
  const T &E1 = v[0], &E2 = v[1], &E3 = v[2], &Z1 = v[3], &Z2 = v[4], &Z3 = v[5], &r = v[6],
          &Pr = v[7];
  const ReducedTerms<T> t = reduced_terms(v, En, mu);
  const T& V = t.V;
  const T& G = t.Gamma;
  const T& Th = t.Theta;
  const T q = Z1 / Z2;
  const T w = mu * Th - r * r * En;
  const T rr = r * (r - 2.0 * mu);
  T h = t.a / m * (0.5 + (2.0 * Th * Th + Z2 * Z2 - E1 * E1) / V) * Pr * Pr;
  h += (G + E2) / (m * r * V) * (E1 * E3 * (q * q - 1.0) - Z3 * E2 * q) * Pr;
  h += (Z2 * Z2 - E1 * E1) / (m * r * r * r * V) * (r * G * G + mu * Z1 * Z1);
  h -= w * w / (m * r * r * r * (r - 2.0 * mu)) * (0.5 - (Z1 * Z1 + Z3 * Z3 - 3.0 * Th * Th) / V);
  h += t.sq / (m * r * V) * (Z3 * (Th - 2.0 * r * En) * Pr - Z1 * Z2 * En);
  h += (E3 * E3 + G * G) / (m * r * r) * (0.5 - 2.0 * E1 * E1 / V);
  h -= w / (m * r * r * V * sqrt(rr)) * (E1 * E3 * Z3 + Z1 * Z2 * E2);
  const T k = q * E1 * E3 + Z3 * G;
  h -= k * k / (m * r * r * V);
  return h;
}

struct ReducedGradient {
  double value = 0.0;
  ReducedVector g{};
  double dEnergy = 0.0;
};

// Raises the typed singularity errors when the state is outside the
// admissible domain of the reduced Hamiltonian.
void check_reduced_domain(const ReducedState& s, const IntegralParams& p);

AuxiliaryTerms auxiliary(const ReducedState& s, const IntegralParams& p);
double mass_squared(const ReducedState& s, const IntegralParams& p);
double casimir_circ(const ReducedState& s);
double casimir_F(const ReducedState& s);

std::pair<ReducedState, IntegralParams> reduce(const FullState& full, double m, double mu);

double hamiltonian_reduced(const ReducedState& s, const IntegralParams& p);
ReducedGradient hamiltonian_reduced_gradient(const ReducedState& s, const IntegralParams& p);
ReducedGradient hamiltonian_reduced_gradient_fd(const ReducedState& s, const IntegralParams& p);
ReducedVector reduced_rhs(const ReducedState& s, const IntegralParams& p);
ReducedVector rhs_from_gradient(const ReducedState& s, const ReducedGradient& g);

std::pair<double, double> tulczyjew_residuals(const ReducedState& s, const IntegralParams& p);
double timelike_indicator(const ReducedState& s, const IntegralParams& p);

struct ReconstructionRates {
  double cosTheta = 0.0;
  double theta = 0.0;
  double dphi = 0.0;
  double dt = 0.0;
};
ReconstructionRates reconstruct_rates(const ReducedState& s, const IntegralParams& p);

// Inverse of reduce() in the frame Q1 = Q2 = 0 (P_theta = 0, cos(theta) = E1 / P_phi).
FullState lift_to_full(const ReducedState& s, const IntegralParams& p, double phi, double t);

// The discrete symmetry E1 -> -E1, E3 -> -E3.
ReducedState symmetry_image(const ReducedState& s);

// Q = 0 branch (E = 0).
struct Q0State {
  Vec3 Z{};
  double r = 0.0;
  double Pr = 0.0;
};

struct Q0Rates {
  double H0 = 0.0;
  Vec3 dZ{};
  double dr = 0.0;
  double dPr = 0.0;
  double dtheta = 0.0;
  double dphi = 0.0;
  double dt = 0.0;
  double radicand = 0.0;
};

double hamiltonian_q0(const Q0State& s, const IntegralParams& p);
std::pair<double, double> tulczyjew_residuals_q0(const Q0State& s, const IntegralParams& p);
// branchSign is +1 for L3 > 0 and -1 for L3 < 0.
Q0Rates q0_rates(const Q0State& s, const IntegralParams& p, double kappa, double theta,
                 int branchSign);

}  // namespace mpspin
