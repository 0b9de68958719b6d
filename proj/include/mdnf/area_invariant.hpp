#pragma once

// Area of the sublevel region {xh^2 + yh <= eps, yh >= 0} with respect to the
// pushed-forward density, its tabulation, and the reparametrization
//   alpha^{-1}(eps) = (3/4 A(eps))^{2/3},  alpha = inverse of that.

#include <cstddef>
#include <memory>
#include <vector>

#include "mdnf/flow.hpp"
#include "mdnf/morse_chart.hpp"
#include "mdnf/numerics.hpp"

namespace mdnf {

// Below this level alpha_inverse_derivative returns its analytic limit.
inline constexpr double kEpsSwitch = 1e-4;

// Nested adaptive quadrature over the parabolic region, written in scaled
// variables xh = sqrt(eps) u, yh = eps v so that the region is fixed:
//   A(eps) = eps^{3/2} integral_{-1}^{1} du integral_0^{1-u^2} dv density_hat.
// Returns exactly 0 at eps = 0.  Throws RegionOutsideDomain when the region
// leaves the validated chart.
double area_below(const NormalizedProblem& problem, double eps, const ToleranceConfig& tol);
double area_below(const NormalizedProblem& problem, double eps);

struct AreaProfile {
  std::vector<double> eps_grid;
  std::vector<double> a_values;
  double omega0 = 0.0;  // density_hat(0, 0)
  // Monotone cubic of A^{1/3} against sqrt(eps); both transforms are
  // monotone and the data become nearly linear.
  MonotoneCubic interpolant;

  // A / eps^{3/2} at the smallest positive grid point against 4/3 omega0.
  double small_eps_ratio = 0.0;
  bool small_eps_ok = false;

  double eps_max() const { return eps_grid.back(); }
  double area(double eps) const;
};

// Grid eps_max (i/n)^2, i = 0..n.  Throws InvalidArgument for n < 16 and
// MonotonicityViolation when the tabulated areas fail to increase.
AreaProfile build_profile(const NormalizedProblem& problem, double eps_max, std::size_t n);

// A(eps)^{2/3} from the profile; 0 at eps = 0.
double a_tilde(const AreaProfile& profile, double eps);

// alpha, alpha^{-1} and (alpha^{-1})' evaluated through a smooth surrogate of
// the level-chart density (see LevelSurrogate).  Immutable.
class AlphaFunction {
 public:
  AlphaFunction() = default;
  AlphaFunction(std::shared_ptr<const LevelSurrogate> surrogate, double omega0);

  static AlphaFunction build(const NormalizedProblem& problem, double z_max);

  double omega0() const { return omega0_; }
  // Largest argument of alpha_inverse (a level of f).
  double eps_max() const { return surrogate_->z_max(); }
  // Largest argument of alpha (a level of H).
  double beta_max() const { return surrogate_->beta_max(); }

  double alpha(double eps) const { return surrogate_->alpha(eps); }
  double alpha_inverse(double eps) const { return surrogate_->beta(eps); }
  double alpha_inverse_derivative(double eps) const { return surrogate_->beta_prime(eps); }
  double area(double eps) const { return surrogate_->area(eps); }

  const LevelSurrogate& surrogate() const { return *surrogate_; }

 private:
  std::shared_ptr<const LevelSurrogate> surrogate_;
  double omega0_ = 0.0;
};

double alpha(const AlphaFunction& fn, double eps);
double alpha_inverse(const AlphaFunction& fn, double eps);

// (alpha^{-1})'(eps) = 1/2 (3/4 A(eps))^{-1/3} |t_f(eps)| with the transit
// time taken from the direct quadrature in `chart`; for eps < kEpsSwitch the
// limit omega0^{2/3} is returned instead.
double alpha_inverse_derivative(const AlphaFunction& fn, const LevelChart& chart, double eps);

}  // namespace mdnf
