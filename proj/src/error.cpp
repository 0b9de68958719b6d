#include "mdnf/error.hpp"

namespace mdnf {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonDifferentiable: return "NonDifferentiable";
    case ErrorCode::MaxSubdivisions: return "MaxSubdivisions";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::NonMonotoneDetected: return "NonMonotoneDetected";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::DegenerateCritical: return "DegenerateCritical";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::OutsideChartDomain: return "OutsideChartDomain";
    case ErrorCode::RegionOutsideDomain: return "RegionOutsideDomain";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mdnf
