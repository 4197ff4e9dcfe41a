#include "mpspin/equilibria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>

namespace mpspin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Smallest spin for which the reduced variables stay regular on Sigma0.
constexpr double kMinSpin = 1e-4;

double bracket_root(const std::function<double(double)>& f, double a, double b, double fa,
                    double fb, double tol) {
  boost::uintmax_t iters = 200;
  auto stop = [tol](double x, double y) { return std::abs(x - y) <= tol; };
  const auto br = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
  return 0.5 * (br.first + br.second);
}

// First sign change of f on a uniform scan of [a, b]; NaN values are skipped.
bool scan_bracket(const std::function<double(double)>& f, double a, double b, int n, double& lo,
                  double& hi, double& flo, double& fhi) {
  double xp = kNaN, fp = kNaN;
  for (int i = 0; i <= n; ++i) {
    const double x = a + (b - a) * i / n;
    double fx;
    try {
      fx = f(x);
    } catch (const Error&) {
      fx = kNaN;
    }
    if (std::isfinite(fx) && std::isfinite(fp) && (fp < 0.0) != (fx < 0.0)) {
      lo = xp;
      hi = x;
      flo = fp;
      fhi = fx;
      return true;
    }
    if (std::isfinite(fx)) {
      xp = x;
      fp = fx;
    } else {
      xp = fp = kNaN;
    }
  }
  return false;
}

double b_of(double r) { return 1.0 - 2.0 / r; }

// b (r^3 - c^2)^2 and derivatives
double bq(double r, double c) {
  const double q = r * r * r - c * c;
  return b_of(r) * q * q;
}
double bq1(double r, double c) {
  const double c2 = c * c;
  return 6 * std::pow(r, 5) - 10 * std::pow(r, 4) - 6 * c2 * r * r + 8 * c2 * r + 2 * c2 * c2 / (r * r);
}
double bq2(double r, double c) {
  const double c2 = c * c;
  return 30 * std::pow(r, 4) - 40 * r * r * r - 12 * c2 * r + 8 * c2 - 4 * c2 * c2 / (r * r * r);
}

// (R, R') in terms of x = sqrt(ell)
void r_and_dr(double r, double c, double x, double En, int s, double& R, double& R1,
              Eigen::Matrix2d* jac) {
  const double A = En * r * r * r - s * c * x;
  const double K = En * c - s * x;
  const double r4b = r * r * r * r - 2 * r * r * r;
  const double r4b1 = 4 * r * r * r - 6 * r * r;
  R = A * A - r4b * K * K - bq(r, c);
  R1 = 6 * En * r * r * A - r4b1 * K * K - bq1(r, c);
  if (jac) {
    // d/dx, d/dE
    (*jac)(0, 0) = 2 * A * (-s * c) - r4b * 2 * K * (-s);
    (*jac)(0, 1) = 2 * A * r * r * r - r4b * 2 * K * c;
    (*jac)(1, 0) = 6 * En * r * r * (-s * c) - r4b1 * 2 * K * (-s);
    (*jac)(1, 1) = 6 * r * r * A + 6 * En * r * r * r * r * r - r4b1 * 2 * K * c;
  }
}

using Vec5 = Eigen::Matrix<double, 5, 1>;

struct N2Unknowns {
  double E2, Z1, Z2, En, r;
};

Vec5 n2_equations(const Vec5& u, double E1, double c) {
  ReducedState s;
  s.E = {E1, u[0], 0.0};
  s.Z = {u[1], u[2], 0.0};
  s.r = u[4];
  s.Pr = 0.0;
  IntegralParams p;
  p.c = c;
  p.energy = u[3];
  p.ell = casimir_F(s);
  const ReducedGradient g = hamiltonian_reduced_gradient(s, p);
  const auto tr = tulczyjew_residuals(s, p);
  Vec5 f;
  f << casimir_circ(s) - c * c, tr.second, mass_squared(s, p) - 1.0,
      (u[0] * g.g[0] - E1 * g.g[1]) / E1, g.g[6];
  return f;
}

bool n2_newton(Vec5& u, double E1, double c) {
  for (int it = 0; it < 40; ++it) {
    Vec5 f;
    try {
      f = n2_equations(u, E1, c);
    } catch (const Error&) {
      return false;
    }
    if (!f.allFinite()) return false;
    if (f.cwiseAbs().maxCoeff() < 1e-14) return true;
    Eigen::Matrix<double, 5, 5> J;
    for (int k = 0; k < 5; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(u[k]));
      Vec5 up = u, um = u;
      up[k] += h;
      um[k] -= h;
      try {
        J.col(k) = (n2_equations(up, E1, c) - n2_equations(um, E1, c)) / (2 * h);
      } catch (const Error&) {
        return false;
      }
    }
    const Vec5 du = J.fullPivLu().solve(-f);
    if (!du.allFinite()) return false;
    u += du;
    if (du.cwiseAbs().maxCoeff() < 1e-15 * std::max(1.0, u.cwiseAbs().maxCoeff())) {
      try {
        f = n2_equations(u, E1, c);
      } catch (const Error&) {
        return false;
      }
      return f.cwiseAbs().maxCoeff() < 1e-11;
    }
  }
  try {
    return n2_equations(u, E1, c).cwiseAbs().maxCoeff() < 1e-11;
  } catch (const Error&) {
    return false;
  }
}

EquilibriumRecord make_record(Family fam, const ReducedState& s, const IntegralParams& p) {
  EquilibriumRecord rec;
  rec.family = fam;
  rec.state = s;
  rec.params = p;
  rec.r = s.r;
  rec.z = s.Z[1];
  try {
    rec.U = timelike_indicator(s, p);
  } catch (const Error&) {
    rec.U = kNaN;
  }
  return rec;
}

}  // namespace

const char* family_name(Family f) noexcept {
  switch (f) {
    case Family::Sigma0Plus: return "Sigma0+";
    case Family::Sigma0Minus: return "Sigma0-";
    case Family::Sigma1: return "Sigma1";
    case Family::Sigma2: return "Sigma2";
  }
  return "?";
}

const char* stability_name(Stability s) noexcept {
  switch (s) {
    case Stability::CenterCenter: return "center-center";
    case Stability::SaddleCenter: return "saddle-center";
    case Stability::SaddleSaddle: return "saddle-saddle";
    case Stability::FocusFocus: return "focus-focus";
    case Stability::Unclassified: return "unclassified";
  }
  return "?";
}

double sigma0_delta(double r, double c, int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  const double c2 = c * c, r3 = r * r * r;
  const double q = r3 - c2;
  return 2 * r3 * (r - 3) * q * q -
         s * r * r * c * (r - 2) * (2 * r3 + c2 - 9 * r * r) *
             std::sqrt(4 * std::pow(r, 7) + 13 * c2 * r * r * r * r - 8 * c2 * c2 * r) +
         c2 * (r - 2) *
             ((r - 2) * c2 * (4 * (2 * r - 3) * c2 + r3 * (8 * r - 39)) + 2 * std::pow(r, 7) * (r - 8) +
              33 * std::pow(r, 6));
}

double sigma0_eta(double r, double c) {
  const double c2 = c * c;
  return std::pow(r, 6) - 2 * c2 * c2 * (r - 2) * (r - 2) - c2 * std::pow(r, 4) * (r - 7) -
         11 * c2 * r * r * r;
}

std::pair<double, double> sigma0_values(double r, double c, int sign) {
  if (!(r > 2.0)) fail(ErrorCode::HorizonDomain, "r must exceed 2");
  if (c < 0.0) fail(ErrorCode::InvalidArgument, "spin must be nonnegative");
  const int s = sign >= 0 ? 1 : -1;
  const double D = sigma0_delta(r, c, s);
  if (!(D > 0.0)) fail(ErrorCode::OutsideDomain, "Delta <= 0: no symmetric circular orbit");
  double x, En;
  if (c == 0.0) {
    x = r / std::sqrt(r - 3.0);
    En = (r - 2.0) / std::sqrt(r * (r - 3.0));
    return {x * x, En};
  }
  const double et = sigma0_eta(r, c);
  const double c2 = c * c, r3 = r * r * r;
  const double den = std::pow(r, 4) * c * std::sqrt(2 * r) * (2 * r3 + c2 - 9 * r * r);
  x = std::sqrt(2 * et * et / (r * D));
  En = s * 2 * ((2 * r - 3) * c2 * c2 - 3 * c2 * r3 + std::pow(r, 6) * (r - 3)) * std::sqrt(et * et / D) / den -
       s * (r3 - c2) * std::sqrt(D) / den;
  // polish on R = R' = 0 (the closed form cancels badly near 2r^3 + c^2 = 9r^2 and small c)
  for (int it = 0; it < 8; ++it) {
    double R, R1;
    Eigen::Matrix2d J;
    r_and_dr(r, c, x, En, s, R, R1, &J);
    const Eigen::Vector2d d = J.fullPivLu().solve(Eigen::Vector2d(-R, -R1));
    if (!d.allFinite()) break;
    x += d[0];
    En += d[1];
    if (d.cwiseAbs().maxCoeff() < 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return {x * x, En};
}

EquilibriumRecord sigma0(double r, double c, int sign) {
  const int s = sign >= 0 ? 1 : -1;
  const auto [ell, En] = sigma0_values(r, c, s);
  const double x = std::sqrt(ell), b = b_of(r), q = r * r * r - c * c;
  ReducedState st;
  st.E = {0.0, s * x, 0.0};
  st.Z = {-r * r * c * (En * c - s * x) / q, c * (r * r * r * En - s * c * x) / (std::sqrt(b) * q), 0.0};
  st.r = r;
  st.Pr = 0.0;
  IntegralParams p;
  p.c = c;
  p.ell = ell;
  p.energy = En;
  p.pphi = 1.0;
  EquilibriumRecord rec;
  rec.family = s > 0 ? Family::Sigma0Plus : Family::Sigma0Minus;
  rec.state = st;
  rec.params = p;
  rec.r = r;
  rec.z = st.Z[1];
  rec.U = u_sigma0_closed(r, c, ell, En, s);
  return rec;
}

double radial_potential(double r, double c, double ell, double energy, int sign) {
  double R, R1;
  r_and_dr(r, c, std::sqrt(ell), energy, sign >= 0 ? 1 : -1, R, R1, nullptr);
  return R;
}

double radial_potential_dr(double r, double c, double ell, double energy, int sign) {
  double R, R1;
  r_and_dr(r, c, std::sqrt(ell), energy, sign >= 0 ? 1 : -1, R, R1, nullptr);
  return R1;
}

double radial_potential_d2r(double r, double c, double ell, double energy, int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0, x = std::sqrt(ell);
  const double A = energy * r * r * r - s * c * x;
  const double K = energy * c - s * x;
  return 2 * (9 * energy * energy * std::pow(r, 4) + 6 * energy * r * A) - 12 * r * (r - 1) * K * K -
         bq2(r, c);
}

double chi_sigma0(double r, double c, double ell, double energy, int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  const double q = r * r * r - c * c;
  const double w = r * r * c * (energy * c - s * std::sqrt(ell)) / q;
  return q - 3 * w * w;
}

double u_sigma0_closed(double r, double c, double ell, double energy, int sign) {
  const double chi = chi_sigma0(r, c, ell, energy, sign);
  const double r3 = r * r * r, c2 = c * c;
  return ((r3 + 2 * c2) * (r3 - c2) - (2 * r3 + c2) * chi) / (chi * chi);
}

double cusp_radius(double c, int sign) {
  auto f = [&](double r) {
    const auto [ell, En] = sigma0_values(r, c, sign);
    return radial_potential_d2r(r, c, ell, En, sign) / std::pow(r, 4);
  };
  double lo, hi, flo, fhi;
  // scan from just outside the photon-sphere region outward
  if (!scan_bracket(f, 2.6, 30.0, 1094, lo, hi, flo, fhi)) fail(ErrorCode::NoCusp, "no cusp on Sigma0");
  return bracket_root(f, lo, hi, flo, fhi, 1e-13);
}

std::array<EquilibriumRecord, 2> sigma1(double c, double energy) {
  if (!(energy > 0.0)) fail(ErrorCode::OutsideDomain, "energy must be positive");
  const double z = (27.0 - c * c) / (27.0 * energy);
  const double q = z * z + 27.0 * (1.0 - z * energy);
  if (!(q > 0.0)) fail(ErrorCode::OutsideDomain, "N1 radicand negative");
  const double rad = (1.0 - z * energy) * (z - 9.0 * energy) * (z - 9.0 * energy) / q - 1.0;
  if (!(rad >= 0.0)) fail(ErrorCode::OutsideDomain, "E3 radicand negative");
  if (!(-z * energy < 0.0)) fail(ErrorCode::OutsideDomain, "U >= 0");
  const double E2 = 3.0 * std::sqrt(3.0) * (3.0 - 2.0 * z * energy) / std::sqrt(q);
  const double E3 = 3.0 * std::sqrt(rad);
  std::array<EquilibriumRecord, 2> out;
  for (int k = 0; k < 2; ++k) {
    ReducedState s;
    s.E = {0.0, E2, k == 0 ? E3 : -E3};
    s.Z = {z, std::sqrt(q), 0.0};
    s.r = 3.0;
    s.Pr = 0.0;
    IntegralParams p;
    p.c = c;
    p.ell = casimir_F(s);
    p.energy = energy;
    p.pphi = 1.0;
    out[k] = make_record(Family::Sigma1, s, p);
    out[k].z = z;
  }
  return out;
}

double ell_star(double c) {
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "c must be positive");
  const double c2 = c * c;
  const double rad = 27.0 + 13.0 / 4.0 * c2 - 2.0 / 27.0 * c2 * c2;
  if (!(rad >= 0.0)) fail(ErrorCode::OutsideDomain, "ell* radicand negative");
  return 2.0 / 9.0 * c2 - 1.5 + 3.0 / c * std::sqrt(rad);
}

std::array<double, 3> n2_residuals(double r, double z, double En, double c) {
  const double c2 = c * c, z2 = z * z, r3 = r * r * r;
  const double w = z2 - c2;
  const double zeta = 3 * z2 * (r - 2) * std::pow(2 * r3 + c2, 2) * w + 4 * c2 * c2 * r3 * (r3 + 2 * c2);
  if (!(zeta > 0.0) || !(w >= 0.0)) return {kNaN, kNaN, zeta};
  const double t1 = 6 * std::pow(r, 3.5) * c2 * c * En;
  const double t2 = std::sqrt(3 * zeta * w);
  const double t3 = 3 * z * std::sqrt(r - 2) * (2 * c2 * r3 - (2 * r3 + c2) * w);
  const double e1 = (t1 - t2 - t3) / (std::abs(t1) + std::abs(t2) + std::abs(t3));
  const double u1 = z * std::sqrt(3 * zeta) / 2 *
                    (z2 * (r - 2) * (c2 * c2 - (2 * r3 + c2) * z2) + c2 * r3 * ((r - 3) * z2 + c2 * (r - 5.0 / 3.0)));
  const double u2 = std::sqrt((r - 2) * w) *
                    (z2 * zeta / 2 + c2 * r3 * z2 / 2 * (2 * r3 + c2) * (3 * w * (r - 1) - 2 * c2) +
                     c2 * c2 * r3 * r3 * (c2 + 3 * z2));
  const double e2 = (u1 + u2) / (std::abs(u1) + std::abs(u2));
  return {e1, e2, zeta};
}

ReducedState n2_state(double r, double z, double En, double c, int sign) {
  const double b = b_of(r), sb = std::sqrt(b), w = z * z - c * c;
  if (!(w > 0.0)) fail(ErrorCode::OutsideDomain, "z^2 <= c^2");
  const double W = r * r * z / (c * std::sqrt(w)) * (c * En - z * sb);
  const double E2 = W * (sb - w / (r * z * z * sb)) + r * En * std::sqrt(w) / (z * sb);
  if (!(z * z > W * W)) fail(ErrorCode::OutsideDomain, "z^2 <= W^2");
  ReducedState s;
  s.E = {(sign >= 0 ? 1.0 : -1.0) * std::sqrt(z * z - W * W), E2, 0.0};
  s.Z = {std::sqrt(w), z, 0.0};
  s.r = r;
  s.Pr = 0.0;
  return s;
}

double equilibrium_residual(const ReducedState& s, const IntegralParams& p) {
  const ReducedVector d = reduced_rhs(s, p);
  double m = 0.0;
  for (double v : d) m = std::max(m, std::abs(v));
  return m;
}

namespace {

Classification classify_raw(const ReducedState& s, const IntegralParams& p, bool& degenerate) {
  using Mat8 = Eigen::Matrix<double, 8, 8>;
  const ReducedVector x = s.pack();
  if (equilibrium_residual(s, p) > 1e-7) fail(ErrorCode::NotAnEquilibrium, "reduced_rhs does not vanish");
  Mat8 J;
  Eigen::Matrix<double, 4, 8> G;
  auto constraints = [&](const ReducedVector& v) {
    const ReducedState t = ReducedState::unpack(v.data());
    const auto tr = tulczyjew_residuals(t, p);
    return Eigen::Vector4d(casimir_circ(t), casimir_F(t), tr.first, tr.second);
  };
  for (int k = 0; k < 8; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
    ReducedVector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const ReducedVector fp = reduced_rhs(ReducedState::unpack(xp.data()), p);
    const ReducedVector fm = reduced_rhs(ReducedState::unpack(xm.data()), p);
    for (int i = 0; i < 8; ++i) J(i, k) = (fp[i] - fm[i]) / (2 * h);
    G.col(k) = (constraints(xp) - constraints(xm)) / (2 * h);
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 8>> svd(G, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 8, 4> Q = svd.matrixV().rightCols<4>();
  const Eigen::Matrix4d K = Q.transpose() * J * Q;
  Classification out;
  out.A = -0.5 * (K * K).trace();
  out.B = K.determinant();
  const double disc = out.A * out.A - 4 * out.B;
  const double rho = Eigen::EigenSolver<Eigen::Matrix4d>(K, false).eigenvalues().cwiseAbs().maxCoeff();
  const double scale = std::pow(rho, 4);
  degenerate = std::abs(out.B) < 1e-9 * scale && std::abs(disc) < 1e-9 * scale;
  if (out.B < 0)
    out.stability = Stability::SaddleCenter;
  else if (disc < 0)
    out.stability = Stability::FocusFocus;
  else
    out.stability = out.A > 0 ? Stability::CenterCenter : Stability::SaddleSaddle;

  out.lambda2Even = out.lambda2Odd = kNaN;
  if (s.E[0] == 0.0 && s.E[2] == 0.0) {
    Eigen::Matrix<double, 8, 8> I = Eigen::Matrix<double, 8, 8>::Identity();
    I(0, 0) = I(2, 2) = -1.0;
    const Eigen::Matrix4d Ir = Q.transpose() * I * Q;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (Ir + Ir.transpose()));
    Eigen::Matrix<double, 4, Eigen::Dynamic> Ve(4, 0), Vo(4, 0);
    for (int i = 0; i < 4; ++i) {
      auto& tgt = es.eigenvalues()[i] > 0 ? Ve : Vo;
      tgt.conservativeResize(4, tgt.cols() + 1);
      tgt.col(tgt.cols() - 1) = es.eigenvectors().col(i);
    }
    if (Ve.cols() == 2 && Vo.cols() == 2) {
      out.lambda2Even = -(Ve.transpose() * K * Ve).determinant();
      out.lambda2Odd = -(Vo.transpose() * K * Vo).determinant();
    }
  }
  return out;
}

}  // namespace

Classification classify(const ReducedState& s, const IntegralParams& p) {
  bool degenerate = false;
  Classification out = classify_raw(s, p, degenerate);
  if (degenerate) fail(ErrorCode::DegenerateSpectrum, "degenerate characteristic polynomial");
  return out;
}

void classify(EquilibriumRecord& rec) {
  const bool symmetric = rec.family == Family::Sigma0Plus || rec.family == Family::Sigma0Minus;
  Classification c;
  if (symmetric && rec.params.c < kMinSpin) {
    // the reduction is singular at zero spin; use the limit along Sigma0
    const EquilibriumRecord reg = sigma0(rec.r, kMinSpin, rec.family == Family::Sigma0Plus ? 1 : -1);
    c = classify(reg.state, reg.params);
  } else {
    c = classify(rec.state, rec.params);
  }
  rec.A = c.A;
  rec.B = c.B;
  rec.stability = c.stability;
}

double c2_point_radius(double c) {
  auto f = [&](double r) {
    const EquilibriumRecord rec = sigma0(r, std::max(c, kMinSpin), 1);
    bool degenerate = false;
    return classify_raw(rec.state, rec.params, degenerate).lambda2Odd;
  };
  double lo, hi, flo, fhi;
  if (!scan_bracket(f, 3.02, 8.0, 60, lo, hi, flo, fhi))
    fail(ErrorCode::BracketFailed, "no odd-mode type change on Sigma0+");
  return bracket_root(f, lo, hi, flo, fhi, 1e-11);
}

Sigma2Curve sigma2(double c, const Sigma2Options& opt) {
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "c must be positive");
  Sigma2Curve curve;
  curve.originR = c2_point_radius(c);
  curve.origin = sigma0(curve.originR, c, 1);
  const ReducedState& o = curve.origin.state;
  Vec5 u;
  u << o.E[1], o.Z[0], o.Z[1], curve.origin.params.energy, o.r;
  Vec5 uPrev = u;
  double e1Prev = 0.0, e1 = 0.0, step = opt.e1Step;
  bool havePrev = false;
  while (static_cast<int>(curve.points.size()) < opt.maxPoints && e1 < opt.e1Max) {
    const double e1Next = e1 + step;
    Vec5 guess = u;
    if (havePrev) guess = u + (u - uPrev) * ((e1Next - e1) / (e1 - e1Prev));
    bool ok = n2_newton(guess, e1Next, c);
    if (ok) {
      // reject jumps to another branch
      ok = (guess - u).cwiseAbs().maxCoeff() < 50.0 * step + 1e-6 && guess[2] > e1Next;
    }
    ReducedState st;
    IntegralParams p;
    if (ok) {
      st.E = {e1Next, guess[0], 0.0};
      st.Z = {guess[1], guess[2], 0.0};
      st.r = guess[4];
      p.c = c;
      p.energy = guess[3];
      p.ell = casimir_F(st);
      p.pphi = 1.0;
      const auto res = n2_residuals(st.r, st.Z[1], p.energy, c);
      ok = res[2] > 0.0 && std::abs(res[0]) < 1e-10 && std::abs(res[1]) < 1e-10;
      if (ok) {
        try {
          ok = equilibrium_residual(st, p) < 1e-8 && timelike_indicator(st, p) < 0.0;
        } catch (const Error&) {
          ok = false;
        }
      }
    }
    if (!ok) {
      step *= 0.5;
      if (step < opt.minStep) break;
      continue;
    }
    uPrev = u;
    e1Prev = e1;
    u = guess;
    e1 = e1Next;
    havePrev = true;
    curve.points.push_back(make_record(Family::Sigma2, st, p));
    step = std::min(step * 1.5, opt.e1Step);
  }
  if (curve.points.empty()) fail(ErrorCode::ContinuationFailed, "no N2 point found near the origin");
  return curve;
}

namespace {

double bisect_gap(const std::function<double(double)>& g, double a, double b, int n, double tol,
                  int& iters) {
  double lo, hi, flo, fhi;
  if (!scan_bracket(g, a, b, n, lo, hi, flo, fhi)) fail(ErrorCode::BracketFailed, "gap does not change sign");
  boost::uintmax_t it = 100;
  auto stop = [tol](double x, double y) { return std::abs(x - y) <= tol; };
  const auto br = boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, stop, it);
  iters = static_cast<int>(it);
  return 0.5 * (br.first + br.second);
}

}  // namespace

CriticalSpins critical_spins(double tol) {
  CriticalSpins cs;
  cs.c2 = bisect_gap([](double c) { return cusp_radius(c, 1) - 3.0; }, 1.1, 1.6, 10, tol, cs.iterations2);
  cs.c1 = bisect_gap([](double c) { return c2_point_radius(c) - cusp_radius(c, 1); }, 0.8, 1.2, 8, tol,
                     cs.iterations1);
  return cs;
}

std::array<double, 4> pauli_lubanski(const ReducedState& s, const IntegralParams& p) {
  // the closed form below assumes P_r = 0
  if (s.Pr != 0.0) return pauli_lubanski_full(lift_to_full(s, p, 0.0, 0.0), p.m, p.mu);
  const double r = s.r, mu = p.mu;
  const double b = 1.0 - 2.0 * mu / r;
  const auto& E = s.E;
  const auto& Z = s.Z;
  const double sq2 = Z[1] * Z[1] - E[0] * E[0];
  if (!(sq2 >= 0.0)) fail(ErrorCode::SingularE1Z2, "E1^2 > Z2^2");
  const double sq = std::sqrt(sq2);
  const double f = casimir_F(s);
  const double pphi = p.pphi < 0.0 ? -std::sqrt(f) : std::sqrt(f);
  if (pphi == 0.0 || std::abs(E[0]) > std::abs(pphi)) fail(ErrorCode::InvalidTheta, "|E1| > |P_phi|");
  const double st = std::sqrt(std::max(0.0, 1.0 - E[0] * E[0] / (pphi * pphi)));
  const double e23 = E[1] * E[1] + E[2] * E[2];
  const double rr = std::sqrt(r * (r - 2.0 * mu));
  const double pre = std::pow(r, 2.5) * std::sqrt(r - 2.0 * mu) * Z[1];
  std::array<double, 4> S;
  S[0] = E[2] * sq / rr;
  S[1] = std::sqrt(b) / (r * Z[1]) * (E[0] * E[1] * Z[0] + E[2] * Z[1] * Z[2]) - p.energy * E[0] -
         (r - 3.0 * mu) * Z[0] * E[0] / (r * r * Z[1]) * sq;
  S[2] = sq / (pphi * pre * st) *
         (E[1] * Z[0] * (r - 3.0 * mu) * sq - Z[0] * e23 * rr + r * r * p.energy * E[1] * Z[1]);
  S[3] = E[2] * pphi * sq / (pre * e23) * (p.energy * r * r * Z[1] + Z[0] * (r - 3.0 * mu) * sq);
  return S;
}

std::array<double, 4> pauli_lubanski_full(const FullState& f, double m, double mu) {
  const Vec4 p = momentum(f, mu);
  const Mat4 S = spin_tensor(f, mu).sCoord;
  const Vec4 g = metric_diagonal(f.point.r, f.point.theta, mu);
  Mat4 Sl{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) Sl[a][b] = g[a] * g[b] * S[a][b];
  const double sqrtg = f.point.r * f.point.r * std::abs(std::sin(f.point.theta));
  auto perm_sign = [](int a, int b, int c, int d) {
    const int v[4] = {a, b, c, d};
    int sgn = 1;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        if (v[i] == v[j]) return 0;
        if (v[i] > v[j]) sgn = -sgn;
      }
    return sgn;
  };
  std::array<double, 4> out{};
  for (int a = 0; a < 4; ++a) {
    double acc = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const int e = perm_sign(a, b, c, d);
          if (e != 0) acc -= e * p[b] * Sl[c][d];  // epsilon^{0123} = -1
        }
    out[a] = acc / (2.0 * m * sqrtg);
  }
  return out;
}

}  // namespace mpspin
