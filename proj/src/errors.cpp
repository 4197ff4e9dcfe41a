#include "mpspin/errors.hpp"

namespace mpspin {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::HorizonDomain: return "HorizonDomain";
    case ErrorCode::PolarAxis: return "PolarAxis";
    case ErrorCode::SingularV: return "SingularV";
    case ErrorCode::SpacelikeVelocity: return "SpacelikeVelocity";
    case ErrorCode::ReductionSingularity: return "ReductionSingularity";
    case ErrorCode::SingularE1Z2: return "SingularE1Z2";
    case ErrorCode::InvalidTheta: return "InvalidTheta";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::NoCusp: return "NoCusp";
    case ErrorCode::ContinuationFailed: return "ContinuationFailed";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::BracketFailed: return "BracketFailed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorCode::ManifoldTerminated: return "ManifoldTerminated";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::SingularV0: return "SingularV0";
    case ErrorCode::MassNonConserving: return "MassNonConserving";
    case ErrorCode::LiftFailed: return "LiftFailed";
  }
  return "Unknown";
}

}  // namespace mpspin
