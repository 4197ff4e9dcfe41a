#pragma once

#include <stdexcept>
#include <string>

namespace mpspin {

enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  HorizonDomain = 2,
  PolarAxis = 3,
  SingularV = 4,
  SpacelikeVelocity = 5,
  ReductionSingularity = 6,
  SingularE1Z2 = 7,
  InvalidTheta = 8,
  OutsideDomain = 9,
  NoCusp = 10,
  ContinuationFailed = 11,
  NotAnEquilibrium = 12,
  DegenerateSpectrum = 13,
  BracketFailed = 14,
  NoConvergence = 15,
  DegenerateCrossing = 16,
  ManifoldTerminated = 17,
  StepUnderflow = 18,
  SingularV0 = 19,
  MassNonConserving = 20,
  LiftFailed = 21,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mpspin
