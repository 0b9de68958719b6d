#pragma once

// Hamiltonian flow of f in the level chart (x, z) = (xh, xh^2 + yh), where the
// area density is w(x, z) = density_hat(x, z - x^2) and the field of f is
// (-1/w, 0).  Level sets are horizontal segments |x| <= sqrt(z).
//
// LevelChart evaluates everything by direct adaptive quadrature and root
// finding.  LevelSurrogate fits w once as a tensor Chebyshev series in the
// scaled variables (v, d) = (x / sqrt(z), sqrt(z)); transit time, bisector,
// time from the bisector and the enclosed area then follow from exact
// operations on the series.

#include <cstddef>
#include <vector>

#include "mdnf/morse_chart.hpp"
#include "mdnf/numerics.hpp"

namespace mdnf {

class LevelChart {
 public:
  explicit LevelChart(NormalizedProblem problem);

  const NormalizedProblem& problem() const { return problem_; }
  // Largest level covered by the validated chart rectangle.
  double z_max() const { return z_max_; }

  // Throws OutsideChartDomain outside the chart rectangle inflated by 10%.
  double density_xz(double x, double z) const;

  // -integral of w(., eps) over [-sqrt(eps), sqrt(eps)].  Throws
  // RegionOutsideDomain for eps outside [0, z_max].
  double transit_time(double eps) const;

  // Root s of integral_{-sqrt z}^{s} w = half the total.
  double bisector(double z) const;
  // Same from the right-anchored equation integral_{s}^{sqrt z} w = half.
  double bisector_mirrored(double z) const;

  // integral_x^{s(z)} w(t, z) dt.
  double time_from_bisector(double x, double z) const;
  // Same with a precomputed bisector value.
  double time_from_bisector(double x, double z, double s) const;

  Vec2 hamiltonian_field_xz(double x, double z) const;

  // Fixed-step RK4 integration of dx/dt = -1/w(x, eps) with negative time
  // step from x = -sqrt(eps) until x reaches sqrt(eps); the final partial
  // step is interpolated linearly.  Returns the (negative) elapsed time.
  // Throws StepLimitExceeded after max_steps steps.
  double transit_time_oracle(double eps, double dt, std::size_t max_steps = 50'000'000) const;

  double quad_tol() const { return quad_tol_; }

 private:
  void check_level(double z) const;
  void check_point(double x, double z) const;
  double integrate_level(double a, double b, double z) const;

  NormalizedProblem problem_;
  double z_max_ = 0.0;
  double quad_tol_ = 1e-10;
};

// Sampled bisector curve.  Samples come from direct root finding; values in
// between are linearly interpolated and meant for diagnostics and plotting.
class Bisector {
 public:
  Bisector() = default;
  static Bisector sample(const LevelChart& chart, double z_hi, std::size_t n);

  double at(double z) const;
  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& s() const { return s_; }

 private:
  std::vector<double> z_;
  std::vector<double> s_;
};

// Values of the level-chart quantities at one point.
struct LevelPoint {
  double density = 0.0;       // w(x, z)
  double transit_time = 0.0;  // t_f(z)
  double bisector = 0.0;      // s(z)
  double time = 0.0;          // T_f(x, z)
};

class LevelSurrogate {
 public:
  LevelSurrogate() = default;

  // Fits h(v, d) = density_hat(d v, d^2 (1 - v^2)) on [-1, 1] x [0, sqrt(z_max)],
  // doubling the node count per direction (from 17 up to max_nodes) until the
  // trailing coefficients fall below tol relative to the largest one.
  static LevelSurrogate build(const NormalizedProblem& problem, double z_max, double tol = 1e-13,
                              std::size_t max_nodes = 129);

  double z_max() const { return delta_max_ * delta_max_; }
  bool converged() const { return converged_; }
  double tail() const { return tail_; }
  std::size_t nodes_v() const { return nv_ + 1; }
  std::size_t nodes_delta() const { return nd_ + 1; }
  std::size_t samples() const { return samples_; }

  // Throws OutsideChartDomain for z outside [0, z_max] or |x| > sqrt(z)
  // beyond a small extrapolation margin.
  LevelPoint evaluate(double x, double z) const;

  double density(double x, double z) const { return evaluate(x, z).density; }
  double transit_time(double z) const;
  double bisector(double z) const;
  double time_from_bisector(double x, double z) const { return evaluate(x, z).time; }

  // Enclosed area A(eps) = eps^{3/2} J(sqrt eps), and J itself (smooth, with
  // J(0) = 4/3 density_hat(0,0)).
  double area(double eps) const;
  double area_scaled(double eps) const;

  // beta = (3/4 A)^{2/3} = eps g(sqrt eps) with g smooth and positive, its
  // derivative, and its inverse alpha.
  double beta(double eps) const;
  double beta_prime(double eps) const;
  double beta_over_eps(double eps) const;
  double alpha(double eps, double tol = 1e-15) const;
  double beta_max() const { return beta(z_max()); }

 private:
  std::vector<double> collapse(double delta) const;
  void scaled_area(double delta, double& J, double& dJ) const;
  void check_level(double z) const;

  double delta_max_ = 0.0;
  std::size_t nv_ = 0;
  std::size_t nd_ = 0;
  std::vector<double> coeffs_;  // (nv_ + 1) x (nd_ + 1), v-degree major
  ChebyshevSeries m_;           // m(d) = integral of h(., d) over [-1, 1]
  GaussRule rule_;
  bool converged_ = false;
  double tail_ = 0.0;
  std::size_t samples_ = 0;
};

}  // namespace mdnf
