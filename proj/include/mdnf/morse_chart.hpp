#pragma once

// Hypothesis checks at the origin, sign normalization, and the boundary Morse
// chart (x, y) -> (xh, yh) with xh = sqrt(f11) x, yh = y (f12 x + f2), in which
// the centered function becomes xh^2 + yh and the boundary stays {yh = 0}.

#include <optional>
#include <string>

#include "mdnf/error.hpp"
#include "mdnf/expr.hpp"
#include "mdnf/numerics.hpp"

namespace mdnf {

inline constexpr double kHypothesisTol = 1e-9;
inline constexpr double kDefaultChartRadius = 0.64;
inline constexpr int kMaxChartHalvings = 10;

struct HypothesisReport {
  double f00 = 0.0;  // f(0,0) of the input, removed by centering
  double fx0 = 0.0;
  double fy0 = 0.0;
  double fxx0 = 0.0;
  double omega0 = 0.0;
  bool flip_f = false;
  bool flip_y = false;
  bool admissible = false;
  std::optional<ErrorCode> failure;
  std::string message;
};

// Never throws for failed hypotheses; those are recorded in the report.
// Checks run in the order NotCritical, NotRegular, DegenerateCritical,
// NonPositiveDensity and the first failure wins.
HypothesisReport check_hypotheses(const ScalarExpression& f, const ScalarExpression& omega,
                                  double hypothesis_tol = kHypothesisTol);

struct HadamardCoefficients {
  double f11 = 0.0;
  double f12 = 0.0;
  double f2 = 0.0;
};

// Integral-remainder coefficients along the ray t -> t * point for a
// centered f with f_x(0,0) = 0:
//   f = f11 x^2 + (f12 x + f2) y.
HadamardCoefficients hadamard_coefficients(const ScalarExpression& f, const Vec2& point,
                                           double quad_tol = 1e-12);

// Chart value, its Jacobian d(xh,yh)/d(x,y) and the coefficients used.
struct MorseJet {
  Vec2 hat{};
  Mat2 jacobian{};
  HadamardCoefficients coeffs;
};

// Throws OutsideChartDomain when f11 <= 0 or f12 x + f2 <= 0.
Vec2 morse_forward(const ScalarExpression& f, const Vec2& point, double quad_tol = 1e-12);
MorseJet morse_forward_jet(const ScalarExpression& f, const Vec2& point, double quad_tol = 1e-12);

struct ChartDomain {
  double radius = kDefaultChartRadius;  // rectangle [-r, r] x [0, r^2] in (xh, yh)
  int halvings = 0;
};

// Preimage of a chart point together with the data needed for densities.
struct ChartPreimage {
  Vec2 point{};
  double det = 0.0;    // det d(xh,yh)/d(x,y) at point
  double omega = 0.0;  // normalized omega at point
};

// A validated (f, omega) pair after centering and sign flips, with its Morse
// chart.  Immutable; copies share the parsed expressions.
class NormalizedProblem {
 public:
  NormalizedProblem(ScalarExpression f, ScalarExpression omega, const HypothesisReport& report,
                    const ToleranceConfig& tol, double chart_radius);

  const ScalarExpression& f() const { return f_; }
  const ScalarExpression& omega() const { return omega_; }
  const HypothesisReport& report() const { return report_; }
  const ToleranceConfig& tolerances() const { return tol_; }
  const ChartDomain& domain() const { return domain_; }
  double radius() const { return domain_.radius; }

  // Normalized derivatives at the origin.
  double fy0() const { return fy0_; }
  double f11_0() const { return f11_0_; }
  double omega_hat0() const { return omega_hat0_; }

  Vec2 forward(const Vec2& point) const;
  MorseJet forward_jet(const Vec2& point) const;

  // Newton inversion of the chart.  Throws NoConvergence or
  // SingularJacobian when the point is outside the injectivity region.
  Vec2 inverse(const Vec2& hat) const { return preimage(hat).point; }
  ChartPreimage preimage(const Vec2& hat) const;
  // Same, starting Newton from a nearby known preimage.
  ChartPreimage preimage(const Vec2& hat, const Vec2& guess) const;

  // Pushed-forward density omega(P) / det at P = inverse(hat).
  double density_hat(const Vec2& hat) const;

  // Normalized f at an original-coordinate point.
  double f_value(const Vec2& point) const { return f_.evaluate(point[0], point[1]); }

 private:
  ChartDomain validate_domain(double radius) const;

  ScalarExpression f_;
  ScalarExpression omega_;
  HypothesisReport report_;
  ToleranceConfig tol_;
  double fy0_ = 1.0;
  double f11_0_ = 1.0;
  double omega_hat0_ = 1.0;
  double quad_tol_ = 1e-12;
  ChartDomain domain_;
};

struct NormalizationResult {
  HypothesisReport report;
  NormalizedProblem problem;
};

// Centers f, applies the sign flips {f -> -f, y -> -y} needed to reach
// f_y(0,0) > 0, f_xx(0,0) > 0, and validates a chart rectangle by halving the
// radius (at most kMaxChartHalvings times).  Throws the hypothesis error code
// of the first failed check.
NormalizationResult check_and_normalize(const ScalarExpression& f, const ScalarExpression& omega,
                                        const ToleranceConfig& tol = {},
                                        double chart_radius = kDefaultChartRadius);

}  // namespace mdnf
