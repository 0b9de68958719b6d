#include "mdnf/normal_form.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "json.hpp"

namespace mdnf {

NormalFormChart::NormalFormChart(LevelChart level, AlphaFunction alpha, double fault_p_scale)
    : level_(std::move(level)), alpha_(std::move(alpha)), fault_p_scale_(fault_p_scale) {}

ChartValue NormalFormChart::evaluate(double x, double y) const {
  ChartValue v;
  const Vec2 hat = problem().forward({x, y});
  v.xh = hat[0];
  v.yh = hat[1];
  v.z = hat[0] * hat[0] + hat[1];
  const LevelPoint lp = alpha_.surrogate().evaluate(v.xh, v.z);
  v.time_f = lp.time;
  v.h = alpha_.alpha_inverse(v.z);
  const double p = -lp.time / alpha_.alpha_inverse_derivative(v.z);
  v.q = v.h - p * p;
  v.p = fault_p_scale_ * p;
  return v;
}

Vec2 NormalFormChart::pq(double x, double y) const {
  const ChartValue v = evaluate(x, y);
  return {v.p, v.q};
}

NormalFormChart build_chart(const NormalizedProblem& problem, double fault_p_scale) {
  LevelChart level(problem);
  AlphaFunction alpha = AlphaFunction::build(problem, level.z_max());
  return NormalFormChart(std::move(level), std::move(alpha), fault_p_scale);
}

NormalFormChart build_chart(const NormalizedProblem& problem, const AlphaFunction& alpha,
                            double fault_p_scale) {
  return NormalFormChart(LevelChart(problem), alpha, fault_p_scale);
}

Vec2 evaluate_chart(const NormalFormChart& chart, double x, double y) { return chart.pq(x, y); }

// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs a check body; any evaluation error makes the check fail.
template <class Body>
void run_check(CheckResult& c, double tol, Body&& body) {
  c.tol = tol;
  try {
    c.max_err = body();
  } catch (const Error&) {
    c.max_err = kInf;
  }
  c.pass = c.max_err <= tol;
}

nlohmann::json check_json(const CheckResult& c) {
  nlohmann::json j;
  j["max_err"] = c.max_err;
  j["tol"] = c.tol;
  j["pass"] = c.pass;
  return j;
}

}  // namespace

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["symplectic"] = check_json(symplectic);
  j["functional"] = check_json(functional);
  j["boundary"] = check_json(boundary);
  j["area"] = check_json(area);
  j["lemma5"] = check_json(lemma5);
  j["bisector"] = check_json(bisector);
  j["overall_pass"] = overall_pass;
  j["grid"] = {{"n", grid_n},
               {"m", grid_m},
               {"extent", grid_extent},
               {"chart_radius", chart_radius},
               {"eps_max", eps_max}};
  j["flips"] = {{"flip_f", flip_f}, {"flip_y", flip_y}};
  return j.dump(2);
}

VerificationReport verify(const NormalFormChart& chart, const VerifyOptions& o) {
  const NormalizedProblem& prob = chart.problem();
  const LevelChart& level = chart.level();
  const AlphaFunction& alpha = chart.alpha();
  VerificationReport r;
  const double radius = prob.radius();
  r.chart_radius = radius;
  r.grid_n = std::max<std::size_t>(o.grid_n, 2);
  r.grid_m = std::max<std::size_t>(o.grid_m, 2);
  r.grid_extent = std::min(o.grid_extent, radius / std::sqrt(2.0));
  r.eps_max = std::min(o.eps_max, radius * radius);
  r.flip_f = prob.report().flip_f;
  r.flip_y = prob.report().flip_y;
  const std::size_t n = r.grid_n;
  const std::size_t m = r.grid_m;
  const double g = r.grid_extent;

  // Grid nodes in (xh, yh), mapped back to the normalized (x, y) plane.  Row
  // j = 0 is the boundary.
  std::vector<Vec2> nodes(n * m);
  std::vector<bool> node_ok(n * m, true);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 hat{-g + 2.0 * g * i / (n - 1), g * g * j / (m - 1)};
      try {
        nodes[j * n + i] = prob.inverse(hat);
      } catch (const Error&) {
        node_ok[j * n + i] = false;
      }
    }
  }
  auto node = [&](std::size_t i, std::size_t j) -> const Vec2& {
    if (!node_ok[j * n + i])
      throw Error(ErrorCode::NoConvergence, "grid node could not be mapped back to (x, y)");
    return nodes[j * n + i];
  };
  auto pq = [&](const Vec2& P) { return chart.pq(P[0], P[1]); };

  run_check(r.symplectic, o.tol_symplectic, [&] {
    double worst = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& P = node(i, j);
        const double h = o.fd_step * std::max({1.0, std::fabs(P[0]), std::fabs(P[1])});
        const Mat2 J = fd_jacobian(pq, P, h);
        const double w = prob.omega().evaluate(P[0], P[1]);
        worst = std::max(worst, std::fabs(det(J) - w) / w);
      }
    }
    return worst;
  });

  run_check(r.functional, o.tol_functional, [&] {
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& P = node(i, j);
        const ChartValue v = chart.evaluate(P[0], P[1]);
        const double rhs = alpha.alpha(v.p * v.p + v.q);
        worst = std::max(worst, std::fabs(prob.f_value(P) - rhs));
      }
    }
    return worst;
  });

  double probe_min = kInf;
  run_check(r.boundary, o.tol_boundary, [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& P = node(i, 0);
      worst = std::max(worst, std::fabs(chart.evaluate(P[0], P[1]).q));
    }
    // The converse direction is sampled: q must be strictly positive just
    // above the boundary.
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& P = node(i, 1);
      probe_min = std::min(probe_min, chart.evaluate(P[0], P[1]).q);
    }
    if (!(probe_min > 0.0)) return kInf;
    return worst;
  });
  r.boundary_probe_min_q = probe_min;

  run_check(r.area, o.tol_area, [&] {
    double worst = 0.0;
    const double top = alpha.alpha_inverse(r.eps_max);
    for (int k = 1; k <= 8; ++k) {
      const double e = top * k / 8.0;
      const double a = area_below(prob, alpha.alpha(e));
      const double model = e * std::sqrt(e);
      worst = std::max(worst, std::fabs(0.75 * a - model) / model);
    }
    return worst;
  });

  run_check(r.lemma5, o.tol_lemma5, [&] {
    double worst = 0.0;
    for (double frac : {0.25, 0.5625, 1.0}) {
      const double e = frac * r.eps_max;
      // Richardson-extrapolated central difference.
      auto central = [&](double h) {
        return (area_below(prob, e + h) - area_below(prob, e - h)) / (2.0 * h);
      };
      const double h = 0.02 * e;
      const double d = (4.0 * central(0.5 * h) - central(h)) / 3.0;
      const double tf = std::fabs(level.transit_time(e));
      worst = std::max(worst, std::fabs(d - tf) / tf);
    }
    return worst;
  });

  run_check(r.bisector, o.tol_bisector, [&] {
    double worst = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double z = r.eps_max * k / 8.0;
      const double s = level.bisector(z);
      const Vec2 P = prob.inverse({s, z - s * s});
      worst = std::max(worst, std::fabs(chart.evaluate(P[0], P[1]).p));
    }
    return worst;
  });

  r.overall_pass = r.symplectic.pass && r.functional.pass && r.boundary.pass && r.area.pass &&
                   r.lemma5.pass && r.bisector.pass;
  return r;
}

}  // namespace mdnf
