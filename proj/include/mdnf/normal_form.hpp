#pragma once

// The normal-form chart
//   H = alpha^{-1}(f),  p = -T_H,  q = H - p^2,
// where T_H is the H-flow time from the bisector.  H and f share level sets
// and bisector, and the H-flow is faster by the factor (alpha^{-1})'(z), so
// T_H(x, z) = T_f(x, z) / (alpha^{-1})'(z).
//
// All coordinates here are those of the normalized problem (after the sign
// flips recorded in its hypothesis report).

#include <cstddef>
#include <string>

#include "mdnf/area_invariant.hpp"
#include "mdnf/flow.hpp"
#include "mdnf/morse_chart.hpp"

namespace mdnf {

struct ChartValue {
  double p = 0.0;
  double q = 0.0;
  double xh = 0.0;
  double yh = 0.0;
  double z = 0.0;       // f level, xh^2 + yh
  double h = 0.0;       // alpha^{-1}(z)
  double time_f = 0.0;  // T_f(xh, z)
};

class NormalFormChart {
 public:
  // fault_p_scale multiplies p after q has been formed; 1 leaves the chart
  // intact and any other value deliberately corrupts it.
  NormalFormChart(LevelChart level, AlphaFunction alpha, double fault_p_scale = 1.0);

  const NormalizedProblem& problem() const { return level_.problem(); }
  const LevelChart& level() const { return level_; }
  const AlphaFunction& alpha() const { return alpha_; }
  double fault_p_scale() const { return fault_p_scale_; }

  // Throws OutsideChartDomain.
  ChartValue evaluate(double x, double y) const;
  Vec2 pq(double x, double y) const;

 private:
  LevelChart level_;
  AlphaFunction alpha_;
  double fault_p_scale_ = 1.0;
};

// Builds the level chart and alpha surrogate over the full validated range.
NormalFormChart build_chart(const NormalizedProblem& problem, double fault_p_scale = 1.0);
NormalFormChart build_chart(const NormalizedProblem& problem, const AlphaFunction& alpha,
                            double fault_p_scale = 1.0);

Vec2 evaluate_chart(const NormalFormChart& chart, double x, double y);

struct VerifyOptions {
  std::size_t grid_n = 41;
  std::size_t grid_m = 21;
  double grid_extent = 0.4;  // grid [-g, g] x [0, g^2] in (xh, yh)
  double eps_max = 0.16;
  double fd_step = 1e-5;
  double tol_symplectic = 1e-6;
  double tol_functional = 1e-6;
  double tol_boundary = 1e-6;
  double tol_area = 1e-6;
  double tol_lemma5 = 1e-4;
  double tol_bisector = 1e-6;
};

struct CheckResult {
  double max_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::size_t grid_n = 0;
  std::size_t grid_m = 0;
  double grid_extent = 0.0;  // effective extent after clipping to the chart
  double chart_radius = 0.0;
  double eps_max = 0.0;      // effective level range of the area checks
  bool flip_f = false;
  bool flip_y = false;

  CheckResult symplectic;  // |det D(p,q) - omega| / omega at interior nodes
  CheckResult functional;  // |f - alpha(p^2 + q)|
  CheckResult boundary;    // |q| on the boundary row
  CheckResult area;        // |3/4 A_H(eps) - eps^{3/2}| / eps^{3/2}
  CheckResult lemma5;      // |A'(eps) - |t_f(eps)|| / |t_f(eps)|
  CheckResult bisector;    // |p| on the bisector
  double boundary_probe_min_q = 0.0;  // min q over the first interior row
  bool overall_pass = false;

  // Keys: symplectic, functional, boundary, area, lemma5, bisector (each
  // {max_err, tol, pass}), overall_pass, grid, flips.
  std::string to_json() const;
};

// Never throws for failed checks; an evaluation error inside a check marks it
// failed with an infinite error.
VerificationReport verify(const NormalFormChart& chart, const VerifyOptions& options = {});

}  // namespace mdnf
