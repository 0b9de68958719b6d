#include "mdnf/area_invariant.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mdnf {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double area_below(const NormalizedProblem& problem, double eps, const ToleranceConfig& tol) {
  const double r = problem.radius();
  const double z_max = 1.1 * r * r;
  if (!(eps >= 0.0) || eps > z_max * (1.0 + 1e-12))
    throw Error(ErrorCode::RegionOutsideDomain,
                "region for eps = " + fmt(eps) + " leaves the validated chart (eps <= " +
                    fmt(z_max) + ")");
  if (eps == 0.0) return 0.0;
  const double w = std::sqrt(eps);
  auto inner = [&](double u) {
    const double top = 1.0 - u * u;
    if (top <= 0.0) return 0.0;
    return integrate_1d([&](double v) { return problem.density_hat({w * u, eps * v}); }, 0.0, top,
                        0.1 * tol.quad_tol)
        .value;
  };
  return eps * w * integrate_1d(inner, -1.0, 1.0, tol.quad_tol).value;
}

double area_below(const NormalizedProblem& problem, double eps) {
  return area_below(problem, eps, problem.tolerances());
}

double AreaProfile::area(double eps) const {
  if (!(eps >= 0.0) || eps > eps_max() * (1.0 + 1e-12))
    throw Error(ErrorCode::TargetOutOfRange,
                "eps = " + fmt(eps) + " outside the profile range [0, " + fmt(eps_max()) + "]");
  const double c = interpolant(std::sqrt(eps));
  return c * c * c;
}

AreaProfile build_profile(const NormalizedProblem& problem, double eps_max, std::size_t n) {
  if (n < 16) throw Error(ErrorCode::InvalidArgument, "profile needs at least 16 intervals");
  if (!(eps_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_max must be positive");
  AreaProfile p;
  p.omega0 = problem.omega_hat0();
  p.eps_grid.resize(n + 1);
  p.a_values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    p.eps_grid[i] = eps_max * t * t;
    p.a_values[i] = area_below(problem, p.eps_grid[i]);
  }
  for (std::size_t i = 1; i <= n; ++i)
    if (!(p.a_values[i] > p.a_values[i - 1]))
      throw Error(ErrorCode::MonotonicityViolation,
                  "tabulated area is not increasing at eps = " + fmt(p.eps_grid[i]) +
                      "; tighten quad_tol or use fewer profile points");
  const double e1 = p.eps_grid[1];
  p.small_eps_ratio = p.a_values[1] / (e1 * std::sqrt(e1));
  const double limit = 4.0 / 3.0 * p.omega0;
  p.small_eps_ok = std::fabs(p.small_eps_ratio - limit) <= 0.05 * limit;
  std::vector<double> root(n + 1);
  std::vector<double> cube_root(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    root[i] = std::sqrt(p.eps_grid[i]);
    cube_root[i] = std::cbrt(p.a_values[i]);
  }
  p.interpolant = MonotoneCubic(std::move(root), std::move(cube_root));
  return p;
}

double a_tilde(const AreaProfile& profile, double eps) {
  const double a = profile.area(eps);
  return a > 0.0 ? std::pow(a, 2.0 / 3.0) : 0.0;
}

AlphaFunction::AlphaFunction(std::shared_ptr<const LevelSurrogate> surrogate, double omega0)
    : surrogate_(std::move(surrogate)), omega0_(omega0) {
  if (!surrogate_) throw Error(ErrorCode::InvalidArgument, "alpha function needs a surrogate");
}

AlphaFunction AlphaFunction::build(const NormalizedProblem& problem, double z_max) {
  auto s = std::make_shared<LevelSurrogate>(LevelSurrogate::build(problem, z_max));
  return AlphaFunction(std::move(s), problem.omega_hat0());
}

double alpha(const AlphaFunction& fn, double eps) { return fn.alpha(eps); }

double alpha_inverse(const AlphaFunction& fn, double eps) { return fn.alpha_inverse(eps); }

double alpha_inverse_derivative(const AlphaFunction& fn, const LevelChart& chart, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::TargetOutOfRange, "eps must be non-negative");
  // Both factors behave like eps^{-1/2} and eps^{1/2}; below the switch the
  // product is replaced by its exact limit.
  if (eps < kEpsSwitch) return std::pow(fn.omega0(), 2.0 / 3.0);
  const double a = fn.area(eps);
  return 0.5 * std::pow(0.75 * a, -1.0 / 3.0) * std::fabs(chart.transit_time(eps));
}

}  // namespace mdnf
