#include "mdnf/flow.hpp"

#include <cmath>
#include <string>

namespace mdnf {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

LevelChart::LevelChart(NormalizedProblem problem) : problem_(std::move(problem)) {
  const double r = problem_.radius();
  z_max_ = 1.1 * r * r;
  quad_tol_ = problem_.tolerances().quad_tol;
}

void LevelChart::check_level(double z) const {
  if (!(z >= 0.0) || z > z_max_ * (1.0 + 1e-12))
    throw Error(ErrorCode::RegionOutsideDomain,
                "level " + fmt(z) + " is outside the validated range [0, " + fmt(z_max_) + "]");
}

void LevelChart::check_point(double x, double z) const {
  const double r = problem_.radius();
  const double yh = z - x * x;
  if (std::fabs(x) > 1.05 * r * (1.0 + 1e-9) || yh < -0.1 * r * r || yh > 1.1 * r * r * (1.0 + 1e-9))
    throw Error(ErrorCode::OutsideChartDomain,
                "(x, z) = (" + fmt(x) + ", " + fmt(z) + ") is outside the level chart");
}

double LevelChart::density_xz(double x, double z) const {
  check_point(x, z);
  return problem_.density_hat({x, z - x * x});
}

double LevelChart::integrate_level(double a, double b, double z) const {
  return integrate_1d([&](double t) { return density_xz(t, z); }, a, b, quad_tol_).value;
}

double LevelChart::transit_time(double eps) const {
  check_level(eps);
  if (eps == 0.0) return 0.0;
  const double w = std::sqrt(eps);
  return -integrate_level(-w, w, eps);
}

double LevelChart::bisector(double z) const {
  check_level(z);
  if (z == 0.0) return 0.0;
  const double w = std::sqrt(z);
  const double half = 0.5 * integrate_level(-w, w, z);
  auto g = [&](double s) { return integrate_level(-w, s, z) - half; };
  double s = find_root_bracketed(g, -w, w, problem_.tolerances().root_tol);
  s -= g(s) / density_xz(s, z);
  return s;
}

double LevelChart::bisector_mirrored(double z) const {
  check_level(z);
  if (z == 0.0) return 0.0;
  const double w = std::sqrt(z);
  const double half = 0.5 * integrate_level(-w, w, z);
  auto g = [&](double s) { return half - integrate_level(s, w, z); };
  double s = find_root_bracketed(g, -w, w, problem_.tolerances().root_tol);
  s -= g(s) / density_xz(s, z);
  return s;
}

double LevelChart::time_from_bisector(double x, double z) const {
  return time_from_bisector(x, z, bisector(z));
}

double LevelChart::time_from_bisector(double x, double z, double s) const {
  check_level(z);
  return integrate_level(x, s, z);
}

Vec2 LevelChart::hamiltonian_field_xz(double x, double z) const {
  return {-1.0 / density_xz(x, z), 0.0};
}

double LevelChart::transit_time_oracle(double eps, double dt, std::size_t max_steps) const {
  check_level(eps);
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "transit time oracle needs eps > 0");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const double end = std::sqrt(eps);
  const double h = -dt;
  // Successive stages are close together, so Newton starts from the last
  // preimage.
  Vec2 last{-end / std::sqrt(problem_.f11_0()), 0.0};
  auto F = [&](double x) {
    check_point(x, eps);
    const ChartPreimage pre = problem_.preimage({x, eps - x * x}, last);
    last = pre.point;
    return -pre.det / pre.omega;
  };
  double x = -end;
  double t = 0.0;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const double k1 = F(x);
    const double k2 = F(x + 0.5 * h * k1);
    const double k3 = F(x + 0.5 * h * k2);
    const double k4 = F(x + h * k3);
    const double next = x + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (next >= end) return t + h * (end - x) / (next - x);
    x = next;
    t += h;
  }
  throw Error(ErrorCode::StepLimitExceeded,
              "transit time oracle exceeded " + std::to_string(max_steps) + " steps");
}

// ---------------------------------------------------------------------------

Bisector Bisector::sample(const LevelChart& chart, double z_hi, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "bisector needs at least one interval");
  Bisector b;
  b.z_.resize(n + 1);
  b.s_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    b.z_[k] = z_hi * static_cast<double>(k) / static_cast<double>(n);
    b.s_[k] = chart.bisector(b.z_[k]);
  }
  return b;
}

double Bisector::at(double z) const {
  if (z_.empty()) throw Error(ErrorCode::InvalidArgument, "empty bisector sample");
  if (z <= z_.front()) return s_.front();
  if (z >= z_.back()) return s_.back();
  const auto it = std::upper_bound(z_.begin(), z_.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - z_.begin()) - 1;
  const double w = (z - z_[i]) / (z_[i + 1] - z_[i]);
  return (1.0 - w) * s_[i] + w * s_[i + 1];
}

// ---------------------------------------------------------------------------

LevelSurrogate LevelSurrogate::build(const NormalizedProblem& problem, double z_max, double tol,
                                     std::size_t max_nodes) {
  if (!(z_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "surrogate level range must be positive");
  LevelSurrogate s;
  s.delta_max_ = std::sqrt(z_max);
  const double D = s.delta_max_;
  const double near = 0.05 * problem.radius();

  // Warm-start Newton from the previous sample when it is close by.
  Vec2 last_hat{1e300, 1e300};
  Vec2 last_point{};
  std::size_t count = 0;
  auto sample = [&](double v, double d) {
    const Vec2 hat{d * v, d * d * (1.0 - v * v)};
    ++count;
    ChartPreimage pre =
        (std::fabs(hat[0] - last_hat[0]) < near && std::fabs(hat[1] - last_hat[1]) < near)
            ? problem.preimage(hat, last_point)
            : problem.preimage(hat);
    if (!(pre.det > 0.0) || !(pre.omega > 0.0))
      throw Error(ErrorCode::OutsideChartDomain, "non-positive density inside the level range");
    last_hat = hat;
    last_point = pre.point;
    return pre.omega / pre.det;
  };
  auto node_v = [](std::size_t j, std::size_t n) { return std::cos(kPi * j / n); };
  auto node_d = [&](std::size_t k, std::size_t n) { return 0.5 * D * (1.0 + std::cos(kPi * k / n)); };

  std::size_t nv = 16;
  std::size_t nd = 16;
  // S[j][k] = h(v_j, d_k).
  std::vector<std::vector<double>> S(nv + 1, std::vector<double>(nd + 1));
  for (std::size_t k = 0; k <= nd; ++k)
    for (std::size_t j = 0; j <= nv; ++j) S[j][k] = sample(node_v(j, nv), node_d(k, nd));

  std::vector<double> C;
  while (true) {
    // Transform along v, then along d.
    std::vector<std::vector<double>> A(nv + 1, std::vector<double>(nd + 1));
    std::vector<double> col(nv + 1);
    for (std::size_t k = 0; k <= nd; ++k) {
      for (std::size_t j = 0; j <= nv; ++j) col[j] = S[j][k];
      const auto a = chebyshev_lobatto_coefficients(col);
      for (std::size_t j = 0; j <= nv; ++j) A[j][k] = a[j];
    }
    C.assign((nv + 1) * (nd + 1), 0.0);
    for (std::size_t j = 0; j <= nv; ++j) {
      const auto c = chebyshev_lobatto_coefficients(A[j]);
      for (std::size_t k = 0; k <= nd; ++k) C[j * (nd + 1) + k] = c[k];
    }
    double cmax = 0.0;
    for (double c : C) cmax = std::max(cmax, std::fabs(c));
    const std::size_t tv = std::max<std::size_t>(3, (nv + 1) / 8);
    const std::size_t td = std::max<std::size_t>(3, (nd + 1) / 8);
    double tail_v = 0.0;
    double tail_d = 0.0;
    for (std::size_t j = 0; j <= nv; ++j)
      for (std::size_t k = 0; k <= nd; ++k) {
        const double a = std::fabs(C[j * (nd + 1) + k]);
        if (j + tv > nv) tail_v = std::max(tail_v, a);
        if (k + td > nd) tail_d = std::max(tail_d, a);
      }
    if (cmax > 0.0) {
      tail_v /= cmax;
      tail_d /= cmax;
    }
    s.tail_ = std::max(tail_v, tail_d);
    s.converged_ = s.tail_ <= tol;
    const bool grow_v = tail_v > tol && 2 * nv + 1 <= max_nodes;
    const bool grow_d = tail_d > tol && 2 * nd + 1 <= max_nodes;
    if (!grow_v && !grow_d) break;
    if (grow_v) {
      std::vector<std::vector<double>> T(2 * nv + 1, std::vector<double>(nd + 1));
      for (std::size_t k = 0; k <= nd; ++k)
        for (std::size_t j = 0; j <= 2 * nv; ++j)
          T[j][k] = (j % 2 == 0) ? S[j / 2][k] : sample(node_v(j, 2 * nv), node_d(k, nd));
      S = std::move(T);
      nv *= 2;
    }
    if (grow_d) {
      std::vector<std::vector<double>> T(nv + 1, std::vector<double>(2 * nd + 1));
      for (std::size_t k = 0; k <= 2 * nd; ++k)
        for (std::size_t j = 0; j <= nv; ++j)
          T[j][k] = (k % 2 == 0) ? S[j][k / 2] : sample(node_v(j, nv), node_d(k, 2 * nd));
      S = std::move(T);
      nd *= 2;
    }
  }
  s.nv_ = nv;
  s.nd_ = nd;
  s.coeffs_ = std::move(C);
  s.samples_ = count;

  // m(d): integrate each d-coefficient column over v in [-1, 1].
  std::vector<double> m(nd + 1, 0.0);
  std::vector<double> col(nv + 1);
  for (std::size_t k = 0; k <= nd; ++k) {
    for (std::size_t j = 0; j <= nv; ++j) col[j] = s.coeffs_[j * (nd + 1) + k];
    const auto ci = chebyshev_integral(col);
    for (double c : ci) m[k] += c;  // T_j(1) = 1
  }
  s.m_ = ChebyshevSeries::from_coefficients(std::move(m), 0.0, D);
  s.rule_ = gauss_legendre(nd / 2 + 4);
  return s;
}

std::vector<double> LevelSurrogate::collapse(double delta) const {
  const double t = 2.0 * delta / delta_max_ - 1.0;
  std::vector<double> c(nv_ + 1);
  std::vector<double> row(nd_ + 1);
  for (std::size_t j = 0; j <= nv_; ++j) {
    std::copy(coeffs_.begin() + static_cast<std::ptrdiff_t>(j * (nd_ + 1)),
              coeffs_.begin() + static_cast<std::ptrdiff_t>((j + 1) * (nd_ + 1)), row.begin());
    c[j] = chebyshev_sum(row, t);
  }
  return c;
}

void LevelSurrogate::check_level(double z) const {
  const double zm = z_max();
  if (!(z >= -1e-14 * zm) || z > zm * (1.0 + 1e-12))
    throw Error(ErrorCode::OutsideChartDomain,
                "level " + fmt(z) + " is outside the surrogate range [0, " + fmt(zm) + "]");
}

LevelPoint LevelSurrogate::evaluate(double x, double z) const {
  check_level(z);
  z = std::clamp(z, 0.0, z_max());
  LevelPoint out;
  const double d = std::sqrt(z);
  if (d == 0.0) {
    if (x != 0.0)
      throw Error(ErrorCode::OutsideChartDomain, "only the origin lies on the zero level");
    out.density = chebyshev_sum(collapse(0.0), 0.0);
    return out;
  }
  const double u = x / d;
  if (std::fabs(u) > 1.05)
    throw Error(ErrorCode::OutsideChartDomain,
                "(x, z) = (" + fmt(x) + ", " + fmt(z) + ") is below the boundary of the level chart");
  const std::vector<double> c = collapse(d);
  const std::vector<double> ci = chebyshev_integral(c);
  const double total = chebyshev_sum(ci, 1.0);
  const double half = 0.5 * total;
  auto g = [&](double v) { return chebyshev_sum(ci, v) - half; };
  double sigma = find_root_bracketed(g, -1.0, 1.0, 1e-15);
  sigma -= g(sigma) / chebyshev_sum(c, sigma);
  out.density = chebyshev_sum(c, u);
  out.transit_time = -d * total;
  out.bisector = d * sigma;
  out.time = d * (chebyshev_sum(ci, sigma) - chebyshev_sum(ci, u));
  return out;
}

double LevelSurrogate::transit_time(double z) const {
  check_level(z);
  const double d = std::sqrt(std::clamp(z, 0.0, z_max()));
  return -d * m_(d);
}

double LevelSurrogate::bisector(double z) const { return evaluate(0.0, z).bisector; }

void LevelSurrogate::scaled_area(double delta, double& J, double& dJ) const {
  // J(d) = integral_0^1 2 w^2 m(d w) dw, exact for the polynomial m.
  J = 0.0;
  dJ = 0.0;
  for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
    const double w = 0.5 * (1.0 + rule_.nodes[i]);
    const double wt = 0.5 * rule_.weights[i];
    J += wt * 2.0 * w * w * m_(delta * w);
    dJ += wt * 2.0 * w * w * w * m_.derivative(delta * w);
  }
}

double LevelSurrogate::area_scaled(double eps) const {
  check_level(eps);
  double J, dJ;
  scaled_area(std::sqrt(std::clamp(eps, 0.0, z_max())), J, dJ);
  return J;
}

double LevelSurrogate::area(double eps) const {
  const double J = area_scaled(eps);
  const double e = std::max(eps, 0.0);
  return e * std::sqrt(e) * J;
}

double LevelSurrogate::beta_over_eps(double eps) const {
  return std::pow(0.75 * area_scaled(eps), 2.0 / 3.0);
}

double LevelSurrogate::beta(double eps) const { return std::max(eps, 0.0) * beta_over_eps(eps); }

double LevelSurrogate::beta_prime(double eps) const {
  check_level(eps);
  const double d = std::sqrt(std::clamp(eps, 0.0, z_max()));
  double J, dJ;
  scaled_area(d, J, dJ);
  const double g = std::pow(0.75 * J, 2.0 / 3.0);
  const double dg = (2.0 / 3.0) * std::pow(0.75 * J, -1.0 / 3.0) * 0.75 * dJ;
  return g + 0.5 * d * dg;
}

double LevelSurrogate::alpha(double eps, double tol) const {
  const double top = beta_max();
  if (!(eps >= 0.0) || eps > top * (1.0 + 1e-12))
    throw Error(ErrorCode::TargetOutOfRange,
                "alpha argument " + fmt(eps) + " outside [0, " + fmt(top) + "]");
  if (eps == 0.0) return 0.0;
  eps = std::min(eps, top);
  auto F = [&](double d) {
    double J, dJ;
    scaled_area(d, J, dJ);
    return d * d * std::pow(0.75 * J, 2.0 / 3.0) - eps;
  };
  const double d = find_root_bracketed(F, 0.0, delta_max_, tol * delta_max_);
  double z = d * d;
  for (int i = 0; i < 2; ++i) {
    const double bp = beta_prime(z);
    z = std::clamp(z - (beta(z) - eps) / bp, 0.0, z_max());
  }
  return z;
}

}  // namespace mdnf
