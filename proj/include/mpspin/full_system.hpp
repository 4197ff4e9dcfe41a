#pragma once

#include <array>
#include <cmath>

#include "mpspin/dual.hpp"
#include "mpspin/geometry.hpp"

namespace mpspin {

inline constexpr int kFullDim = 14;
using FullVector = std::array<double, kFullDim>;

// Packed layout: t r theta phi | P_t P_r P_theta P_phi | L1 L2 L3 | M1 M2 M3
struct FullState {
  SpacetimePoint point;
  Vec4 P{};
  Vec3 L{};
  Vec3 M{};

  FullVector pack() const;
  static FullState unpack(const FullVector& x);
};

struct SpinTensor {
  Mat4 sAB{};
  Mat4 sCoord{};
};

struct DMatrix {
  Mat4 D{};  // D^alpha_beta
  double d = 0.0;
};

struct MPInvariants {
  double m = 0.0;
  double c2 = 0.0;
  double k = 0.0;
  double d = 0.0;
  double casimirStar = 0.0;
  double casimirCirc = 0.0;
};

struct FullConserved {
  double energy = 0.0;
  Vec3 Q{};
  double F = 0.0;
};

template <class T>
struct FullKinematics {
  T p[4];       // p_alpha
  T pu[4];      // p^alpha
  T ginv[4];
  T S[4][4];    // S^{alpha beta}
  T W[4][4];    // R_{gamma beta mu nu} S^{mu nu}
  T D[4][4];    // D^alpha_beta
  T d;
  T p2;
};

template <class T>
void full_kinematics(const T* x, double mu, FullKinematics<T>& k) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T& r = x[1];
  const T& th = x[2];
  const T a = 1.0 - 2.0 * mu / r;
  const T sa = sqrt(a);
  const T s = sin(th), c = cos(th);
  const T* L = x + 8;
  const T* M = x + 11;

  T sab[4][4];
  for (auto& row : sab)
    for (auto& v : row) v = T(0.0);
  for (int i = 0; i < 3; ++i) {
    sab[0][i + 1] = M[i];
    sab[i + 1][0] = -M[i];
  }
  sab[1][2] = L[2];
  sab[2][1] = -L[2];
  sab[1][3] = -L[1];
  sab[3][1] = L[1];
  sab[2][3] = L[0];
  sab[3][2] = -L[0];

  const T e[4] = {1.0 / sa, sa, 1.0 / r, 1.0 / (r * s)};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k.S[i][j] = sab[i][j] * e[i] * e[j];

  k.p[0] = x[4] - mu / (r * r) * M[0];
  k.p[1] = x[5];
  k.p[2] = x[6] - sa * L[2];
  k.p[3] = x[7] + sa * s * L[1] - c * L[0];

  k.ginv[0] = -1.0 / a;
  k.ginv[1] = a;
  k.ginv[2] = 1.0 / (r * r);
  k.ginv[3] = 1.0 / (r * r * s * s);
  k.p2 = T(0.0);
  for (int i = 0; i < 4; ++i) {
    k.pu[i] = k.ginv[i] * k.p[i];
    k.p2 += k.pu[i] * k.p[i];
  }

  for (auto& row : k.W)
    for (auto& v : row) v = T(0.0);
  T pairs[6];
  curvature_pairs(r, s * s, mu, pairs);
  for (int q = 0; q < 6; ++q) {
    const int i = kCurvaturePairs[q][0], j = kCurvaturePairs[q][1];
    const T w = 2.0 * pairs[q] * k.S[i][j];
    k.W[i][j] = w;
    k.W[j][i] = -w;
  }
  k.d = T(0.0);
  for (int al = 0; al < 4; ++al) {
    for (int be = 0; be < 4; ++be) {
      T acc(0.0);
      for (int g = 0; g < 4; ++g) acc += k.S[al][g] * k.W[g][be];
      k.D[al][be] = acc;
    }
    k.d += 0.5 * k.D[al][al];
  }
}

template <class T>
T hamiltonian_full_t(const T* x, double m, double mu) {
  FullKinematics<T> k;
  full_kinematics(x, mu, k);
  T dpp(0.0);
  for (int al = 0; al < 4; ++al) {
    T row(0.0);
    for (int g = 0; g < 4; ++g) row += k.D[al][g] * k.pu[g];
    dpp += k.p[al] * row;
  }
  return k.p2 / (2.0 * m) - dpp / (m * (k.d + 2.0 * k.p2));
}

FullState make_full_state(const SpacetimePoint& y, const Vec4& P, const Vec3& L, const Vec3& M);

SpinTensor spin_tensor(const FullState& s, double mu);
Vec4 momentum(const FullState& s, double mu);
DMatrix d_matrix(const FullState& s, double mu);
Vec4 velocity(const FullState& s, double mu);
Vec4 tulczyjew_residual(const FullState& s, double mu);
MPInvariants invariants(const FullState& s, double mu);
FullConserved conserved(const FullState& s);
double hamiltonian_full(const FullState& s, double m, double mu);
FullVector hamiltonian_full_gradient(const FullVector& x, double m, double mu);
FullVector hamiltonian_full_gradient_fd(const FullVector& x, double m, double mu);
FullVector mp_rhs(const FullVector& x, double m, double mu);

// Builds a state on the Tulczyjew manifold from the spatial spin L and the
// spatial tetrad momentum components, with p_A p^A = -mass^2.
FullState tulczyjew_state(const SpacetimePoint& y, const Vec3& L, const Vec3& pTetrad,
                          double mass, double mu);

}  // namespace mpspin
