#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdnf {

enum class ErrorCode {
  SyntaxError,
  UnknownIdentifier,
  EmptyInput,
  DomainError,
  NonDifferentiable,
  MaxSubdivisions,
  NoBracket,
  TargetOutOfRange,
  NonMonotoneDetected,
  SingularJacobian,
  NoConvergence,
  NotCritical,
  DegenerateCritical,
  NotRegular,
  NonPositiveDensity,
  OutsideChartDomain,
  RegionOutsideDomain,
  MonotonicityViolation,
  StepLimitExceeded,
  InvalidArgument,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure with the byte offset into the source text and the set of
// tokens that would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected, const std::string& what)
      : Error(ErrorCode::SyntaxError, what),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

// Quadrature ran out of panels; the best estimate is kept for diagnostics.
class MaxSubdivisionsError : public Error {
 public:
  MaxSubdivisionsError(double value, double error_estimate, const std::string& what)
      : Error(ErrorCode::MaxSubdivisions, what),
        value_(value),
        error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

}  // namespace mdnf
