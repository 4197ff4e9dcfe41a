#include "mpspin/integrate.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "dop853_tableau.hpp"

namespace mpspin {

namespace tab = dop853;

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrExponent = -1.0 / 8.0;

double rms_scaled(const std::vector<double>& v, const std::vector<double>& scale) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const double q = v[i] / scale[i];
    s += q * q;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

const char* termination_name(TerminationReason r) noexcept {
  switch (r) {
    case TerminationReason::Completed: return "Completed";
    case TerminationReason::HorizonReached: return "HorizonReached";
    case TerminationReason::Escaped: return "Escaped";
    case TerminationReason::SingularV: return "SingularV";
    case TerminationReason::SingularE1Z2: return "SingularE1Z2";
    case TerminationReason::SpacelikeVelocity: return "SpacelikeVelocity";
    case TerminationReason::StepUnderflow: return "StepUnderflow";
    case TerminationReason::Stopped: return "Stopped";
  }
  return "Unknown";
}

TerminationReason reason_from_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::HorizonDomain: return TerminationReason::HorizonReached;
    case ErrorCode::SingularV:
    case ErrorCode::SingularV0:
    case ErrorCode::MassNonConserving: return TerminationReason::SingularV;
    case ErrorCode::SingularE1Z2:
    case ErrorCode::ReductionSingularity: return TerminationReason::SingularE1Z2;
    case ErrorCode::SpacelikeVelocity: return TerminationReason::SpacelikeVelocity;
    default: return TerminationReason::StepUnderflow;
  }
}

Dop853::Dop853(int n, RhsFn f, IntegratorConfig cfg, double direction)
    : n_(n), fn_(std::move(f)), cfg_(cfg), dir_(direction >= 0 ? 1.0 : -1.0) {
  y_.assign(n, 0.0);
  yOld_ = f_ = fOld_ = yNew_ = fNew_ = tmp_ = y_;
  K_.assign(tab::kStagesExtended, std::vector<double>(n, 0.0));
  F_.assign(tab::kInterpolatorPower, std::vector<double>(n, 0.0));
}

void Dop853::eval(double t, const double* y, double* dy) {
  ++nfev_;
  fn_(t, y, dy);
  for (int i = 0; i < n_; ++i)
    if (!std::isfinite(dy[i])) fail(ErrorCode::SingularV, "non-finite derivative");
}

void Dop853::start(double t0, const double* y0) {
  t_ = tOld_ = t0;
  std::copy(y0, y0 + n_, y_.begin());
  yOld_ = y_;
  eval(t_, y_.data(), f_.data());
  fOld_ = f_;
  h_ = cfg_.hInit > 0.0 ? cfg_.hInit : initialStep();
  h_ = std::min(h_, cfg_.hMax);
  denseReady_ = false;
}

double Dop853::initialStep() {
  std::vector<double> scale(n_);
  for (int i = 0; i < n_; ++i) scale[i] = cfg_.atol + std::abs(y_[i]) * cfg_.rtol;
  const double d0 = rms_scaled(y_, scale);
  const double d1 = rms_scaled(f_, scale);
  const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  std::vector<double> y1(n_), f1(n_);
  for (int i = 0; i < n_; ++i) y1[i] = y_[i] + h0 * dir_ * f_[i];
  try {
    eval(t_ + h0 * dir_, y1.data(), f1.data());
  } catch (const Error&) {
    return h0 * 1e-3;
  }
  for (int i = 0; i < n_; ++i) f1[i] -= f_[i];
  const double d2 = rms_scaled(f1, scale) / h0;
  const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  return std::min(100.0 * h0, h1);
}

bool Dop853::attempt(double h, double& errNorm) {
  auto& K = K_;
  K[0] = f_;
  for (int s = 1; s < tab::kStages; ++s) {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < s; ++j) acc += tab::A[s][j] * K[j][i];
      tmp_[i] = y_[i] + h * acc;
    }
    eval(t_ + tab::C[s] * h, tmp_.data(), K[s].data());
  }
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < tab::kStages; ++j) acc += tab::B[j] * K[j][i];
    yNew_[i] = y_[i] + h * acc;
  }
  eval(t_ + h, yNew_.data(), fNew_.data());
  K[tab::kStages] = fNew_;

  double n5 = 0.0, n3 = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double scale = cfg_.atol + std::max(std::abs(y_[i]), std::abs(yNew_[i])) * cfg_.rtol;
    double e5 = 0.0, e3 = 0.0;
    for (int j = 0; j <= tab::kStages; ++j) {
      e5 += tab::E5[j] * K[j][i];
      e3 += tab::E3[j] * K[j][i];
    }
    e5 /= scale;
    e3 /= scale;
    n5 += e5 * e5;
    n3 += e3 * e3;
  }
  if (n5 == 0.0 && n3 == 0.0) {
    errNorm = 0.0;
  } else {
    errNorm = std::abs(h) * n5 / std::sqrt((n5 + 0.01 * n3) * n_);
  }
  return std::isfinite(errNorm);
}

std::optional<TerminationReason> Dop853::step(double tBound) {
  const double minStep =
      std::max(cfg_.hMin, 10.0 * std::abs(std::nextafter(t_, dir_ * INFINITY) - t_));
  double hAbs = std::clamp(std::abs(h_), minStep, cfg_.hMax);
  bool rejected = false;
  std::optional<TerminationReason> pending;
  while (true) {
    if (hAbs < minStep) {
      return pending.value_or(TerminationReason::StepUnderflow);
    }
    double h = hAbs * dir_;
    double tNew = t_ + h;
    if (dir_ * (tNew - tBound) > 0.0) {
      tNew = tBound;
      h = tNew - t_;
      hAbs = std::abs(h);
    }
    double err = 0.0;
    bool ok = false;
    try {
      ok = attempt(h, err);
    } catch (const Error& e) {
      pending = reason_from_error(e.code());
      message_ = e.what();
      ok = false;
    }
    if (!ok) {
      hAbs *= 0.25;
      rejected = true;
      continue;
    }
    if (err < 1.0) {
      double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kErrExponent));
      if (rejected) factor = std::min(1.0, factor);
      tOld_ = t_;
      yOld_ = y_;
      fOld_ = f_;
      hPrev_ = h;
      t_ = tNew;
      y_ = yNew_;
      f_ = fNew_;
      h_ = hAbs * factor;
      denseReady_ = false;
      ++steps_;
      return std::nullopt;
    }
    hAbs *= std::max(kMinFactor, kSafety * std::pow(err, kErrExponent));
    rejected = true;
  }
}

void Dop853::dense(double t, double* out) {
  const double h = hPrev_;
  if (!denseReady_) {
    auto& K = K_;
    for (int s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
      for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += tab::A[s][j] * K[j][i];
        tmp_[i] = yOld_[i] + h * acc;
      }
      eval(tOld_ + tab::C[s] * h, tmp_.data(), K[s].data());
    }
    for (int i = 0; i < n_; ++i) {
      const double dy = y_[i] - yOld_[i];
      F_[0][i] = dy;
      F_[1][i] = h * fOld_[i] - dy;
      F_[2][i] = 2.0 * dy - h * (f_[i] + fOld_[i]);
      for (int q = 0; q < tab::kInterpolatorPower - 3; ++q) {
        double acc = 0.0;
        for (int j = 0; j < tab::kStagesExtended; ++j) acc += tab::D[q][j] * K[j][i];
        F_[3 + q][i] = h * acc;
      }
    }
    denseReady_ = true;
  }
  const double x = (t - tOld_) / h;
  for (int i = 0; i < n_; ++i) {
    double v = 0.0;
    for (int q = tab::kInterpolatorPower - 1, k = 0; q >= 0; --q, ++k) {
      v += F_[q][i];
      v *= (k % 2 == 0) ? x : (1.0 - x);
    }
    out[i] = yOld_[i] + v;
  }
}

void Dop853::stepFromOld(double h, double* out) {
  std::vector<std::vector<double>> K(tab::kStages, std::vector<double>(n_));
  std::vector<double> tmp(n_);
  K[0] = fOld_;
  for (int s = 1; s < tab::kStages; ++s) {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < s; ++j) acc += tab::A[s][j] * K[j][i];
      tmp[i] = yOld_[i] + h * acc;
    }
    eval(tOld_ + tab::C[s] * h, tmp.data(), K[s].data());
  }
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < tab::kStages; ++j) acc += tab::B[j] * K[j][i];
    out[i] = yOld_[i] + h * acc;
  }
}

GuardFn radial_guard(int rIndex, double mu, const IntegratorConfig& cfg) {
  const double tol = cfg.horizonTol, rMax = cfg.rMax;
  return [=](double, const double* y) -> std::optional<TerminationReason> {
    const double r = y[rIndex];
    if (!(r - 2.0 * mu >= tol)) return TerminationReason::HorizonReached;
    if (r > rMax) return TerminationReason::Escaped;
    return std::nullopt;
  };
}

Termination integrate(int n, const RhsFn& f, const std::vector<double>& y0, double t0,
                      const IntegratorConfig& cfg, const StepObserver& observer,
                      const GuardFn& guard, double direction) {
  Termination term;
  const double dir = direction >= 0 ? 1.0 : -1.0;
  const double tEnd = t0 + dir * cfg.tauMax;
  term.finalState = y0;
  term.tau = t0;
  if (guard) {
    if (auto g = guard(t0, y0.data())) {
      term.reason = *g;
      return term;
    }
  }
  Dop853 solver(n, f, cfg, dir);
  try {
    solver.start(t0, y0.data());
  } catch (const Error& e) {
    term.reason = reason_from_error(e.code());
    term.message = e.what();
    return term;
  }
  long steps = 0;
  while (dir * (solver.t() - tEnd) < 0.0) {
    if (++steps > cfg.maxSteps) {
      term.reason = TerminationReason::StepUnderflow;
      term.message = "step budget exhausted";
      break;
    }
    if (auto fail = solver.step(tEnd)) {
      term.reason = *fail;
      term.message = solver.lastMessage();
      term.tau = solver.t();
      term.finalState = solver.y();
      return term;
    }
    if (guard) {
      if (auto g = guard(solver.t(), solver.y().data())) {
        term.reason = *g;
        term.tau = solver.t();
        term.finalState = solver.y();
        return term;
      }
    }
    if (observer && !observer(solver)) {
      term.reason = TerminationReason::Stopped;
      term.tau = solver.t();
      term.finalState = solver.y();
      return term;
    }
  }
  term.tau = solver.t();
  term.finalState = solver.y();
  return term;
}

Trajectory integrate_dense(int n, const RhsFn& f, const std::vector<double>& y0, double t0,
                           double outputStep, const IntegratorConfig& cfg, const GuardFn& guard) {
  Trajectory traj;
  traj.tau.push_back(t0);
  traj.states.push_back(y0);
  double next = t0 + outputStep;
  std::vector<double> buf(n);
  auto obs = [&](Dop853& s) {
    while (next <= s.t()) {
      s.dense(next, buf.data());
      traj.tau.push_back(next);
      traj.states.push_back(buf);
      next += outputStep;
    }
    return true;
  };
  traj.termination = integrate(n, f, y0, t0, cfg, obs, guard);
  return traj;
}

Crossing henon_step(int n, const RhsFn& f, const std::vector<double>& y, double t, int index,
                    double target, const IntegratorConfig& cfg) {
  // State is (y, t) with s = y[index] as independent variable.
  RhsFn g = [&](double, const double* z, double* dz) {
    f(z[n], z, dz);
    const double fk = dz[index];
    if (std::abs(fk) < 1e-14) fail(ErrorCode::DegenerateCrossing, "section tangency");
    for (int i = 0; i < n; ++i) dz[i] /= fk;
    dz[n] = 1.0 / fk;
  };
  std::vector<double> z(y);
  z.push_back(t);
  const double s0 = y[index];
  const double span = target - s0;
  Crossing out;
  if (span == 0.0) {
    out.tau = t;
    out.state = y;
    return out;
  }
  IntegratorConfig c = cfg;
  c.hMax = std::abs(span);
  c.hInit = std::abs(span);
  c.hMin = 0.0;
  Dop853 solver(n + 1, g, c, span > 0 ? 1.0 : -1.0);
  solver.start(s0, z.data());
  int guardCount = 0;
  while (solver.t() != target) {
    if (auto r = solver.step(target)) fail(ErrorCode::DegenerateCrossing, "Henon step failed");
    if (++guardCount > 1000) fail(ErrorCode::DegenerateCrossing, "Henon step did not converge");
  }
  const auto& zf = solver.y();
  out.state.assign(zf.begin(), zf.begin() + n);
  out.state[index] = target;
  out.tau = zf[n];
  return out;
}

std::vector<Crossing> henon_cross(Dop853& solver, const RhsFn& f, int index, int direction,
                                  const IntegratorConfig& cfg) {
  std::vector<Crossing> out;
  const int n = solver.dim();
  const double t0 = solver.tOld(), t1 = solver.t();
  constexpr int kSub = 8;
  std::vector<double> buf(n);
  auto valueAt = [&](double t) {
    if (t == t0) return solver.yOld()[index];
    if (t == t1) return solver.y()[index];
    solver.dense(t, buf.data());
    return buf[index];
  };
  const double y0 = solver.yOld()[index], y1 = solver.y()[index];
  // Quick reject when the step is far from the section.
  const double lo = std::min(y0, y1), hi = std::max(y0, y1);
  const double slope = std::max(std::abs(solver.f()[index]), 1e-300) * std::abs(t1 - t0);
  if (lo > 0.0 && lo > 4.0 * slope + 1e-3 * (hi - lo)) return out;
  if (hi < 0.0 && -hi > 4.0 * slope + 1e-3 * (hi - lo)) return out;

  double ta = t0, va = y0;
  for (int k = 1; k <= kSub; ++k) {
    const double tb = t0 + (t1 - t0) * k / kSub;
    const double vb = valueAt(tb);
    const bool crossing = (va < 0.0 && vb >= 0.0) || (va > 0.0 && vb <= 0.0);
    if (crossing && va != 0.0) {
      boost::uintmax_t iters = 200;
      auto fn = [&](double t) { return valueAt(t); };
      auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); };
      double tStar = tb;
      if (vb != 0.0) {
        const auto br = ta < tb ? boost::math::tools::toms748_solve(fn, ta, tb, va, vb, tol, iters)
                                : boost::math::tools::toms748_solve(fn, tb, ta, vb, va, tol, iters);
        tStar = 0.5 * (br.first + br.second);
      }
      std::vector<double> yc(n);
      solver.stepFromOld(tStar - t0, yc.data());
      std::vector<double> dy(n);
      f(tStar, yc.data(), dy.data());
      if (std::abs(dy[index]) < 1e-12 || (dy[index] > 0.0 ? 1 : -1) != direction) {
        ta = tb;
        va = vb;
        continue;
      }
      try {
        out.push_back(henon_step(n, f, yc, tStar, index, 0.0, cfg));
      } catch (const Error&) {
      }
    }
    ta = tb;
    va = vb;
  }
  return out;
}

}  // namespace mpspin
