#pragma once

// Run configuration and the end-to-end pipeline behind the CLI.
//
// Config files are flat "key = value" lines; '#' starts a comment and values
// may be wrapped in double quotes.  Recognized keys:
//   f, omega                       expressions (required)
//   eps_max, profile_points        area profile range and resolution
//   grid_n, grid_m, grid_extent    verification / chart grid
//   chart_radius                   initial Morse chart radius
//   quad_tol, root_tol, newton_max_iter, fd_step, verify_tol
//   tol_symplectic, tol_functional, tol_boundary, tol_area, tol_lemma5,
//   tol_bisector                   per-check overrides (default verify_tol,
//                                  lemma5 defaults to 1e-4)
//   output_dir, formats            artifact directory and "csv,json" subset
//   fault_p_scale                  deliberate chart corruption (default 1)

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mdnf/area_invariant.hpp"
#include "mdnf/morse_chart.hpp"
#include "mdnf/normal_form.hpp"
#include "mdnf/numerics.hpp"

namespace mdnf {

struct RunConfig {
  std::string f_expr;
  std::string omega_expr;
  double eps_max = 0.16;
  std::size_t profile_points = 64;
  std::size_t grid_n = 41;
  std::size_t grid_m = 21;
  double grid_extent = 0.4;
  double chart_radius = kDefaultChartRadius;
  ToleranceConfig tolerances;
  std::optional<double> tol_symplectic;
  std::optional<double> tol_functional;
  std::optional<double> tol_boundary;
  std::optional<double> tol_area;
  std::optional<double> tol_lemma5;
  std::optional<double> tol_bisector;
  std::string output_dir;
  bool format_csv = true;
  bool format_json = true;
  double fault_p_scale = 1.0;

  VerifyOptions verify_options() const;
  // Throws ConfigError on a violated invariant.
  void validate() const;
};

// Throws ConfigError naming the offending line.
RunConfig parse_config(std::string_view text);
// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path);

enum class TableFormat { Csv, Json };

// Lazily parses, normalizes and builds the chart for one configuration.
// Not thread-safe.
class Session {
 public:
  explicit Session(RunConfig config);

  const RunConfig& config() const { return config_; }
  RunConfig& mutable_config() { return config_; }

  // Parses the expressions (throwing parse errors) and checks the
  // hypotheses without throwing on failure.
  HypothesisReport check();
  std::string check_json();

  // Throw the hypothesis error when the input is not admissible.
  const NormalizedProblem& problem();
  const NormalFormChart& chart();

  // Level range used by profile, verify and levels: eps_max clipped to the
  // square of the validated chart radius.
  double effective_eps_max();

  // Columns eps, A, A_tilde, alpha_inv.  `summary` receives the small-eps
  // ratio diagnostic.
  std::string profile_table(TableFormat format, std::string* summary = nullptr);
  // Columns x, y, p, q, f, alpha_of_s on the verification grid, in input
  // coordinates.
  std::string chart_table(TableFormat format);
  // Columns curve_id, x, y: ten level sets, the boundary and the bisector.
  std::string levels_table(TableFormat format);
  VerificationReport verify();

  // Chart value at an input-coordinate point.
  Vec2 chart_at(double x, double y);

 private:
  void ensure_parsed();

  RunConfig config_;
  std::optional<ScalarExpression> f_;
  std::optional<ScalarExpression> omega_;
  std::unique_ptr<NormalizationResult> normalized_;
  std::unique_ptr<NormalFormChart> chart_;
};

}  // namespace mdnf
