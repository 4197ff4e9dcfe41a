#pragma once

#include <array>
#include <vector>

#include "mpspin/reduced_system.hpp"

namespace mpspin {

enum class Family { Sigma0Plus, Sigma0Minus, Sigma1, Sigma2 };
enum class Stability { CenterCenter, SaddleCenter, SaddleSaddle, FocusFocus, Unclassified };

const char* family_name(Family f) noexcept;
const char* stability_name(Stability s) noexcept;

struct EquilibriumRecord {
  Family family = Family::Sigma0Plus;
  ReducedState state;
  IntegralParams params;
  double r = 0.0;
  double z = 0.0;  // Z2 on the asymmetric families
  double A = 0.0;
  double B = 0.0;
  Stability stability = Stability::Unclassified;
  double U = 0.0;
};

struct Classification {
  double A = 0.0;
  double B = 0.0;
  Stability stability = Stability::Unclassified;
  // lambda^2 of the modes even / odd under E1, E3 -> -E1, -E3 (only for
  // symmetric equilibria, otherwise NaN)
  double lambda2Even = 0.0;
  double lambda2Odd = 0.0;
};

// Symmetric family. sign = +1 for Sigma0+, -1 for Sigma0-.
double sigma0_delta(double r, double c, int sign);
double sigma0_eta(double r, double c);
// (ell, energy) on Sigma0; throws OutsideDomain when Delta <= 0.
std::pair<double, double> sigma0_values(double r, double c, int sign);
EquilibriumRecord sigma0(double r, double c, int sign);

// Radial potential and its r-derivatives at fixed (ell, energy).
double radial_potential(double r, double c, double ell, double energy, int sign);
double radial_potential_dr(double r, double c, double ell, double energy, int sign);
double radial_potential_d2r(double r, double c, double ell, double energy, int sign);
double chi_sigma0(double r, double c, double ell, double energy, int sign);
double u_sigma0_closed(double r, double c, double ell, double energy, int sign);

double cusp_radius(double c, int sign);

// N1+ and N1- at r = 3.
std::array<EquilibriumRecord, 2> sigma1(double c, double energy);
double ell_star(double c);

struct Sigma2Options {
  double e1Step = 0.01;
  double minStep = 1e-5;
  double e1Max = 10.0;
  int maxPoints = 2000;
};
struct Sigma2Curve {
  std::vector<EquilibriumRecord> points;  // N2+ (E1 > 0); N2- is symmetry_image
  double originR = 0.0;                   // C2 point on Sigma0+
  EquilibriumRecord origin;
};
Sigma2Curve sigma2(double c, const Sigma2Options& opt = {});
// Both relations of the implicit N2 system and zeta.
std::array<double, 3> n2_residuals(double r, double z, double energy, double c);
// N2 state built from (r, z, energy); sign picks E1 > 0 or E1 < 0.
ReducedState n2_state(double r, double z, double energy, double c, int sign);

double equilibrium_residual(const ReducedState& s, const IntegralParams& p);
Classification classify(const ReducedState& s, const IntegralParams& p);
void classify(EquilibriumRecord& rec);

// Type-change point C2 on Sigma0+ (odd-mode lambda^2 = 0).
double c2_point_radius(double c);

struct CriticalSpins {
  double c1 = 0.0;
  double c2 = 0.0;
  int iterations1 = 0;
  int iterations2 = 0;
};
CriticalSpins critical_spins(double tol = 1e-6);

// Pauli-Lubanski vector (S^t, S^r, S^theta, S^phi) from reduced variables.
std::array<double, 4> pauli_lubanski(const ReducedState& s, const IntegralParams& p);
// Direct contraction on a full state.
std::array<double, 4> pauli_lubanski_full(const FullState& f, double m, double mu);

}  // namespace mpspin
