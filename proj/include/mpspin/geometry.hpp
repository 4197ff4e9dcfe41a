#pragma once

#include <array>

#include "mpspin/errors.hpp"

namespace mpspin {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

// Coordinate indices t, r, theta, phi = 0..3.
struct SpacetimePoint {
  double t = 0.0;
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct GeometryCache {
  double a = 0.0;  // 1 - 2 mu / r
  double b = 0.0;  // 1 - 2 / r
  Vec4 metric_diag{};
  double christoffel[4][4][4] = {};    // Gamma^alpha_{mu nu}
  double riemann[4][4][4][4] = {};     // R_{alpha beta mu nu}
  Mat4 tetrad{};                       // tetrad[A][alpha] = e_A^alpha
  double omega[4][4][4] = {};          // omega_{alpha A B}
};

// The six independent curvature components R_{ijij} in this order.
inline constexpr int kCurvaturePairs[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                              {1, 2}, {1, 3}, {2, 3}};

double lapse(double r, double mu);

void require_outside_horizon(double r, double mu);
void require_off_axis(double theta);

// R_{trtr}, R_{t th t th}, R_{t ph t ph}, R_{r th r th}, R_{r ph r ph}, R_{th ph th ph}
template <class T, class S>
void curvature_pairs(const T& r, const S& sin2, double mu, T out[6]) {
  const T a = 1.0 - 2.0 * mu / r;
  out[0] = -2.0 * mu / (r * r * r);
  out[1] = a * mu / r;
  out[2] = a * mu / r * sin2;
  out[3] = -mu / (r * a);
  out[4] = -mu / (r * a) * sin2;
  out[5] = 2.0 * mu * r * sin2;
}

std::array<double, 6> curvature(const SpacetimePoint& p, double mu);

struct TetradRotation {
  Mat4 tetrad{};
  double omega[4][4][4] = {};
};

TetradRotation tetrad_and_rotation(const SpacetimePoint& p, double mu);

GeometryCache geometry(const SpacetimePoint& p, double mu);

Vec4 metric_diagonal(double r, double theta, double mu);

}  // namespace mpspin
