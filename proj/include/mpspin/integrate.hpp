#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpspin/errors.hpp"

namespace mpspin {

// dy/dt = f(t, y); may throw mpspin::Error for states outside the domain.
using RhsFn = std::function<void(double t, const double* y, double* dy)>;

struct IntegratorConfig {
  double rtol = 1e-12;
  double atol = 1e-12;
  double hInit = 0.0;  // 0 selects automatically
  double hMax = 1.0;
  double hMin = 1e-14;
  double tauMax = 1e5;
  double rMax = 1e3;
  double horizonTol = 1e-3;  // r - 2mu below this counts as reaching the horizon
  long maxSteps = 50'000'000;
};

enum class TerminationReason {
  Completed,
  HorizonReached,
  Escaped,
  SingularV,
  SingularE1Z2,
  SpacelikeVelocity,
  StepUnderflow,
  Stopped,
};

const char* termination_name(TerminationReason r) noexcept;
TerminationReason reason_from_error(ErrorCode code) noexcept;

struct Termination {
  TerminationReason reason = TerminationReason::Completed;
  double tau = 0.0;
  std::vector<double> finalState;
  std::string message;
};

class Dop853 {
 public:
  Dop853(int n, RhsFn f, IntegratorConfig cfg, double direction = 1.0);

  void start(double t0, const double* y0);
  // Advances one accepted step without passing tBound.  Returns nullopt on
  // success or the failure reason.
  std::optional<TerminationReason> step(double tBound);

  // 7th-order interpolant on the last accepted step.
  void dense(double t, double* out);
  // Plain Runge-Kutta step of size h from the start of the last accepted step.
  void stepFromOld(double h, double* out);

  int dim() const { return n_; }
  double t() const { return t_; }
  double tOld() const { return tOld_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& yOld() const { return yOld_; }
  const std::vector<double>& f() const { return f_; }
  const std::string& lastMessage() const { return message_; }
  long nfev() const { return nfev_; }
  long steps() const { return steps_; }

 private:
  void eval(double t, const double* y, double* dy);
  double initialStep();
  bool attempt(double h, double& errNorm);

  int n_;
  RhsFn fn_;
  IntegratorConfig cfg_;
  double dir_;
  double t_ = 0.0, tOld_ = 0.0, h_ = 0.0, hPrev_ = 0.0;
  std::vector<double> y_, yOld_, f_, fOld_, yNew_, fNew_, tmp_;
  std::vector<std::vector<double>> K_;
  std::vector<std::vector<double>> F_;
  bool denseReady_ = false;
  std::string message_;
  long nfev_ = 0, steps_ = 0;
};

// Called after each accepted step; return false to stop.
using StepObserver = std::function<bool(Dop853& solver)>;

// Guard evaluated at every accepted state; returns a reason to terminate.
using GuardFn = std::function<std::optional<TerminationReason>(double t, const double* y)>;

// Stops at r - 2mu < horizonTol or r > rMax, with r stored at y[rIndex].
GuardFn radial_guard(int rIndex, double mu, const IntegratorConfig& cfg);

Termination integrate(int n, const RhsFn& f, const std::vector<double>& y0, double t0,
                      const IntegratorConfig& cfg, const StepObserver& observer = nullptr,
                      const GuardFn& guard = nullptr, double direction = 1.0);

// Samples the trajectory at a fixed output interval via dense output.
struct Trajectory {
  std::vector<double> tau;
  std::vector<std::vector<double>> states;
  Termination termination;
};

Trajectory integrate_dense(int n, const RhsFn& f, const std::vector<double>& y0, double t0,
                           double outputStep, const IntegratorConfig& cfg,
                           const GuardFn& guard = nullptr);

struct Crossing {
  double tau = 0.0;
  std::vector<double> state;
};

// One step with the section coordinate y[index] as independent variable,
// from the state y (at time t) to y[index] = target.
Crossing henon_step(int n, const RhsFn& f, const std::vector<double>& y, double t, int index,
                    double target, const IntegratorConfig& cfg);

// Locates the transversal crossings of y[index] = 0 inside the last accepted
// step of the solver with sign(dy[index]/dt) = direction, in time order.
// Tangential contacts and crossings in the other direction are skipped.
std::vector<Crossing> henon_cross(Dop853& solver, const RhsFn& f, int index, int direction,
                                  const IntegratorConfig& cfg);

}  // namespace mpspin
