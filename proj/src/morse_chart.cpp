#include "mdnf/morse_chart.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mdnf {

namespace {

template <int N>
struct Small {
  std::array<double, N> v{};
  friend Small operator+(Small a, const Small& b) {
    for (int i = 0; i < N; ++i) a.v[i] += b.v[i];
    return a;
  }
  friend Small operator-(Small a, const Small& b) {
    for (int i = 0; i < N; ++i) a.v[i] -= b.v[i];
    return a;
  }
  friend Small operator*(Small a, double s) {
    for (int i = 0; i < N; ++i) a.v[i] *= s;
    return a;
  }
};

template <int N>
double max_norm(const Small<N>& s) {
  double m = 0.0;
  for (double x : s.v) m = std::max(m, std::fabs(x));
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

HypothesisReport check_hypotheses(const ScalarExpression& f, const ScalarExpression& omega,
                                  double tol) {
  HypothesisReport r;
  const Jet2 j = f.evaluate_jet2(0.0, 0.0);
  r.f00 = j.v;
  r.fx0 = j.dx;
  r.fy0 = j.dy;
  r.fxx0 = j.dxx;
  r.omega0 = omega.evaluate(0.0, 0.0);
  auto fail = [&](ErrorCode code, std::string msg) {
    r.failure = code;
    r.message = std::move(msg);
    r.admissible = false;
    return r;
  };
  if (std::fabs(r.fx0) > tol)
    return fail(ErrorCode::NotCritical,
                "origin is not a critical point of f on the boundary: f_x(0,0) = " + fmt(r.fx0));
  if (std::fabs(r.fy0) <= tol)
    return fail(ErrorCode::NotRegular, "f is not regular at the origin: f_y(0,0) = " + fmt(r.fy0));
  if (std::fabs(r.fxx0) <= tol)
    return fail(ErrorCode::DegenerateCritical,
                "degenerate boundary critical point: f_xx(0,0) = " + fmt(r.fxx0));
  if (!(r.omega0 > 0.0))
    return fail(ErrorCode::NonPositiveDensity,
                "area density must be positive at the origin: omega(0,0) = " + fmt(r.omega0));
  // f -> -f fixes the sign of f_xx together with f_y; y -> -y fixes f_y alone.
  r.flip_f = r.fxx0 < 0.0;
  r.flip_y = (r.fy0 < 0.0) != r.flip_f;
  r.admissible = true;
  r.message = "admissible";
  return r;
}

HadamardCoefficients hadamard_coefficients(const ScalarExpression& f, const Vec2& p,
                                           double quad_tol) {
  const double fy0 = f.evaluate_jet2(0.0, 0.0).dy;
  auto g = [&](double t) {
    const Jet<2> j = f.evaluate_jet<2>(t * p[0], t * p[1]);
    const double w = 1.0 - t;
    return Small<3>{{w * j.partial(2, 0), w * j.partial(1, 1), w * j.partial(0, 2)}};
  };
  const auto I = integrate_adaptive<Small<3>>(g, 0.0, 1.0, quad_tol,
                                              [](const Small<3>& s) { return max_norm(s); });
  return HadamardCoefficients{I.v[0], 2.0 * I.v[1], fy0 + p[1] * I.v[2]};
}

namespace {

MorseJet forward_jet_impl(const ScalarExpression& f, double fy0, const Vec2& p, double quad_tol) {
  const double x = p[0];
  const double y = p[1];
  auto g = [&](double t) {
    const Jet<3> j = f.evaluate_jet<3>(t * x, t * y);
    const double w1 = 1.0 - t;
    const double w2 = (1.0 - t) * t;
    return Small<7>{{w1 * j.partial(2, 0), w1 * j.partial(1, 1), w1 * j.partial(0, 2),
                     w2 * j.partial(3, 0), w2 * j.partial(2, 1), w2 * j.partial(1, 2),
                     w2 * j.partial(0, 3)}};
  };
  const auto I = integrate_adaptive<Small<7>>(g, 0.0, 1.0, quad_tol,
                                              [](const Small<7>& s) { return max_norm(s); });
  const double f11 = I.v[0];
  const double f12 = 2.0 * I.v[1];
  const double K = I.v[2];
  const double f2 = fy0 + y * K;
  const double L = f12 * x + f2;
  if (!(f11 > 0.0) || !(L > 0.0))
    throw Error(ErrorCode::OutsideChartDomain,
                "point (" + fmt(x) + ", " + fmt(y) + ") is outside the Morse chart: f11 = " +
                    fmt(f11) + ", f12*x + f2 = " + fmt(L));
  const double f11_x = I.v[3];
  const double f11_y = I.v[4];
  const double f12_x = 2.0 * I.v[4];
  const double f12_y = 2.0 * I.v[5];
  const double K_x = I.v[5];
  const double K_y = I.v[6];
  const double sq = std::sqrt(f11);
  const double L_x = f12 + x * f12_x + y * K_x;
  const double L_y = x * f12_y + K + y * K_y;
  MorseJet m;
  m.coeffs = {f11, f12, f2};
  m.hat = {sq * x, y * L};
  m.jacobian = {{{sq + x * f11_x / (2.0 * sq), x * f11_y / (2.0 * sq)}, {y * L_x, L + y * L_y}}};
  return m;
}

}  // namespace

Vec2 morse_forward(const ScalarExpression& f, const Vec2& point, double quad_tol) {
  const HadamardCoefficients h = hadamard_coefficients(f, point, quad_tol);
  const double L = h.f12 * point[0] + h.f2;
  if (!(h.f11 > 0.0) || !(L > 0.0))
    throw Error(ErrorCode::OutsideChartDomain,
                "point (" + fmt(point[0]) + ", " + fmt(point[1]) +
                    ") is outside the Morse chart: f11 = " + fmt(h.f11) +
                    ", f12*x + f2 = " + fmt(L));
  return {std::sqrt(h.f11) * point[0], point[1] * L};
}

MorseJet morse_forward_jet(const ScalarExpression& f, const Vec2& point, double quad_tol) {
  return forward_jet_impl(f, f.evaluate_jet2(0.0, 0.0).dy, point, quad_tol);
}

// ---------------------------------------------------------------------------

NormalizedProblem::NormalizedProblem(ScalarExpression f, ScalarExpression omega,
                                     const HypothesisReport& report, const ToleranceConfig& tol,
                                     double chart_radius)
    : f_(std::move(f)), omega_(std::move(omega)), report_(report), tol_(tol) {
  tol_.validate();
  if (!(chart_radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "chart radius must be strictly positive");
  quad_tol_ = std::min(tol_.quad_tol, 1e-12);
  const Jet2 j = f_.evaluate_jet2(0.0, 0.0);
  fy0_ = j.dy;
  f11_0_ = 0.5 * j.dxx;
  const double w0 = omega_.evaluate(0.0, 0.0);
  omega_hat0_ = w0 / (std::sqrt(f11_0_) * fy0_);
  domain_ = validate_domain(chart_radius);
}

Vec2 NormalizedProblem::forward(const Vec2& point) const {
  return morse_forward(f_, point, quad_tol_);
}

MorseJet NormalizedProblem::forward_jet(const Vec2& point) const {
  return forward_jet_impl(f_, fy0_, point, quad_tol_);
}

ChartPreimage NormalizedProblem::preimage(const Vec2& hat) const {
  return preimage(hat, Vec2{hat[0] / std::sqrt(f11_0_), hat[1] / fy0_});
}

ChartPreimage NormalizedProblem::preimage(const Vec2& hat, const Vec2& guess) const {
  // Keep the jet at the best iterate so the determinant is not recomputed.
  double best_res = std::numeric_limits<double>::infinity();
  MorseJet best;
  Vec2 best_point{};
  auto map = [&](const Vec2& p) {
    MorseJet m = forward_jet(p);
    const double res = std::max(std::fabs(m.hat[0] - hat[0]), std::fabs(m.hat[1] - hat[1]));
    if (res < best_res) {
      best_res = res;
      best = m;
      best_point = p;
    }
    return std::make_pair(m.hat, m.jacobian);
  };
  const Vec2 p = newton_invert_2d(map, hat, guess, {tol_.root_tol, tol_.newton_max_iter});
  if (p != best_point) best = forward_jet(p);
  ChartPreimage out;
  out.point = p;
  out.det = det(best.jacobian);
  out.omega = omega_.evaluate(p[0], p[1]);
  return out;
}

double NormalizedProblem::density_hat(const Vec2& hat) const {
  const ChartPreimage pre = preimage(hat);
  if (!(pre.det > 0.0))
    throw Error(ErrorCode::SingularJacobian, "Morse chart Jacobian is not positive at the preimage");
  return pre.omega / pre.det;
}

ChartDomain NormalizedProblem::validate_domain(double radius) const {
  // Sample an inflated rectangle so that level-set integrals and
  // finite-difference stencils near the edges stay inside the validated
  // region.
  constexpr int kSamples = 11;
  for (int halving = 0; halving <= kMaxChartHalvings; ++halving) {
    const double r = radius;
    bool ok = true;
    for (int i = 0; i < kSamples && ok; ++i) {
      for (int j = 0; j < kSamples && ok; ++j) {
        const double xh = -1.05 * r + 2.1 * r * i / (kSamples - 1);
        const double yh = -0.1 * r * r + 1.2 * r * r * j / (kSamples - 1);
        try {
          const ChartPreimage pre = preimage({xh, yh});
          ok = pre.det > 0.0 && pre.omega > 0.0 && std::isfinite(pre.omega);
        } catch (const Error&) {
          ok = false;
        }
      }
    }
    if (ok) return ChartDomain{r, halving};
    radius *= 0.5;
  }
  throw Error(ErrorCode::OutsideChartDomain,
              "no valid Morse chart rectangle found after " + std::to_string(kMaxChartHalvings) +
                  " halvings of the chart radius");
}

NormalizationResult check_and_normalize(const ScalarExpression& f, const ScalarExpression& omega,
                                        const ToleranceConfig& tol, double chart_radius) {
  HypothesisReport report = check_hypotheses(f, omega);
  if (!report.admissible) throw Error(*report.failure, report.message);
  ScalarExpression fn = f.transformed(report.flip_y, report.f00, report.flip_f);
  ScalarExpression wn = report.flip_y ? omega.transformed(true, 0.0, false) : omega;
  NormalizedProblem problem(std::move(fn), std::move(wn), report, tol, chart_radius);
  return NormalizationResult{report, std::move(problem)};
}

}  // namespace mdnf
