#include "mdnf/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mdnf {

void ToleranceConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be strictly positive");
  };
  positive(quad_tol, "quad_tol");
  positive(root_tol, "root_tol");
  positive(fd_step, "fd_step");
  positive(verify_tol, "verify_tol");
  if (newton_max_iter <= 0)
    throw Error(ErrorCode::InvalidArgument, "newton_max_iter must be strictly positive");
  if (fd_step * fd_step < std::numeric_limits<double>::epsilon())
    throw Error(ErrorCode::InvalidArgument,
                "fd_step is too small: fd_step^2 must not fall below machine epsilon");
}

double find_root_bracketed(const std::function<double(double)>& g, double a, double b, double tol,
                           int max_iter) {
  double fa = g(a);
  double fb = g(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw Error(ErrorCode::NoBracket, "root not bracketed: g(" + std::to_string(a) + ") and g(" +
                                          std::to_string(b) + ") have the same sign");
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = g(b);
  }
  return b;
}

double invert_monotone(const std::function<double(double)>& F, double target, double lo, double hi,
                       double tol, int monotone_samples) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "invert_monotone requires lo < hi");
  const double flo = F(lo);
  const double fhi = F(hi);
  if (target < flo || target > fhi)
    throw Error(ErrorCode::TargetOutOfRange,
                "target " + std::to_string(target) + " outside [" + std::to_string(flo) + ", " +
                    std::to_string(fhi) + "]");
  if (monotone_samples > 0) {
    double prev = flo;
    for (int k = 1; k <= monotone_samples; ++k) {
      const double v = F(lo + (hi - lo) * k / monotone_samples);
      if (v < prev)
        throw Error(ErrorCode::NonMonotoneDetected, "sampled decrease in a function assumed increasing");
      prev = v;
    }
  }
  if (target == flo) return lo;
  if (target == fhi) return hi;
  return find_root_bracketed([&](double x) { return F(x) - target; }, lo, hi, tol);
}

Vec2 newton_invert_2d(const MapWithJacobian& map_and_jacobian, const Vec2& target,
                      const Vec2& guess, const NewtonOptions& options) {
  auto residual_norm = [&](const Vec2& v) {
    return std::max(std::fabs(v[0] - target[0]), std::fabs(v[1] - target[1]));
  };
  const double floor_tol =
      8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::max(std::fabs(target[0]), std::fabs(target[1])));
  Vec2 p = guess;
  auto [value, jac] = map_and_jacobian(p);
  double res = residual_norm(value);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (res <= floor_tol) return p;
    const double dj = det(jac);
    const double scale = std::max({std::fabs(jac[0][0]), std::fabs(jac[0][1]), std::fabs(jac[1][0]),
                                   std::fabs(jac[1][1])});
    if (!(std::fabs(dj) > 1e-14 * scale * scale) || !std::isfinite(dj))
      throw Error(ErrorCode::SingularJacobian, "singular Jacobian in Newton inversion");
    const double r0 = target[0] - value[0];
    const double r1 = target[1] - value[1];
    const Vec2 step{(jac[1][1] * r0 - jac[0][1] * r1) / dj, (-jac[1][0] * r0 + jac[0][0] * r1) / dj};
    // Halve the step until the residual does not grow.
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      const Vec2 trial{p[0] + lambda * step[0], p[1] + lambda * step[1]};
      try {
        auto [tv, tj] = map_and_jacobian(trial);
        const double tres = residual_norm(tv);
        if (tres < res || (tres == res && res <= options.tol)) {
          p = trial;
          value = tv;
          jac = tj;
          accepted = tres < res;
          res = tres;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::OutsideChartDomain) throw;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (res <= options.tol) return p;
      throw Error(ErrorCode::NoConvergence, "Newton inversion stalled at residual " + std::to_string(res));
    }
  }
  if (res <= options.tol) return p;
  throw Error(ErrorCode::NoConvergence, "Newton inversion did not converge in " +
                                            std::to_string(options.max_iter) + " iterations");
}

Vec2 newton_invert_2d(const std::function<Vec2(const Vec2&)>& map,
                      const std::function<Mat2(const Vec2&)>& jacobian, const Vec2& target,
                      const Vec2& guess, const NewtonOptions& options) {
  return newton_invert_2d([&](const Vec2& p) { return std::make_pair(map(p), jacobian(p)); }, target,
                          guess, options);
}

Mat2 fd_jacobian(const std::function<Vec2(const Vec2&)>& map, const Vec2& point, double h) {
  Mat2 j{};
  for (int col = 0; col < 2; ++col) {
    Vec2 plus = point;
    Vec2 minus = point;
    plus[col] += h;
    minus[col] -= h;
    const Vec2 fp = map(plus);
    const Vec2 fm = map(minus);
    for (int row = 0; row < 2; ++row) j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
  }
  return j;
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kPi = 3.14159265358979323846;
}  // namespace

std::vector<double> chebyshev_lobatto_coefficients(const std::vector<double>& values) {
  const std::size_t n = values.size();
  const std::size_t m = n - 1;
  std::vector<double> c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = (k == 0 || k == m) ? 0.5 : 1.0;
      s += w * values[k] * std::cos(kPi * static_cast<double>(j * k % (2 * m)) / m);
    }
    c[j] = 2.0 * s / m;
  }
  c[0] *= 0.5;
  c[m] *= 0.5;
  return c;
}

double chebyshev_sum(const std::vector<double>& c, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

std::vector<double> chebyshev_integral(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> b(n + 1, 0.0);
  auto coef = [&](std::size_t k) { return k < n ? c[k] : 0.0; };
  for (std::size_t k = 1; k <= n; ++k) {
    const double prev = (k == 1) ? 2.0 * coef(0) : coef(k - 1);
    b[k] = (prev - coef(k + 1)) / (2.0 * static_cast<double>(k));
  }
  // T_k(-1) = (-1)^k; fix b_0 so the antiderivative vanishes at -1.
  double at_minus_one = 0.0;
  for (std::size_t k = 1; k <= n; ++k) at_minus_one += (k % 2 == 0 ? 1.0 : -1.0) * b[k];
  b[0] = -at_minus_one;
  return b;
}

GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least one node");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

ChebyshevSeries ChebyshevSeries::fit(const std::function<double(double)>& f, double a, double b,
                                     double tol, std::size_t min_nodes, std::size_t max_nodes) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "Chebyshev interval must satisfy a < b");
  ChebyshevSeries s;
  s.a_ = a;
  s.b_ = b;
  auto point = [&](std::size_t k, std::size_t m) {
    const double t = std::cos(kPi * static_cast<double>(k) / static_cast<double>(m));
    return 0.5 * (a + b) + 0.5 * (b - a) * t;
  };
  std::size_t n = std::max<std::size_t>(min_nodes, 3);
  // Round up to 2^k + 1 so that doubling reuses samples.
  std::size_t m = 2;
  while (m + 1 < n) m *= 2;
  n = m + 1;
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = f(point(k, m));
  while (true) {
    s.coeffs_ = chebyshev_lobatto_coefficients(values);
    double cmax = 0.0;
    for (double c : s.coeffs_) cmax = std::max(cmax, std::fabs(c));
    double tail = 0.0;
    const std::size_t tail_len = std::max<std::size_t>(3, n / 8);
    for (std::size_t k = n - tail_len; k < n; ++k) tail = std::max(tail, std::fabs(s.coeffs_[k]));
    s.tail_ = cmax > 0 ? tail / cmax : 0.0;
    s.converged_ = s.tail_ <= tol;
    if (s.converged_ || 2 * m + 1 > max_nodes) break;
    std::vector<double> next(2 * m + 1);
    for (std::size_t k = 0; k <= 2 * m; ++k)
      next[k] = (k % 2 == 0) ? values[k / 2] : f(point(k, 2 * m));
    values = std::move(next);
    m *= 2;
    n = m + 1;
  }
  s.set_derivative();
  return s;
}

ChebyshevSeries ChebyshevSeries::from_coefficients(std::vector<double> coeffs, double a, double b) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "Chebyshev interval must satisfy a < b");
  ChebyshevSeries s;
  s.a_ = a;
  s.b_ = b;
  s.coeffs_ = std::move(coeffs);
  s.converged_ = true;
  s.set_derivative();
  return s;
}

ChebyshevSeries ChebyshevSeries::antiderivative() const {
  std::vector<double> c = chebyshev_integral(coeffs_);
  for (double& v : c) v *= 0.5 * (b_ - a_);
  return from_coefficients(std::move(c), a_, b_);
}

// Derivative coefficients via the backward recurrence, scaled to x.
void ChebyshevSeries::set_derivative() {
  const std::size_t nc = coeffs_.size();
  deriv_coeffs_.assign(nc, 0.0);
  if (nc < 2) return;
  std::vector<double> d(nc + 1, 0.0);
  for (std::size_t k = nc - 1; k >= 1; --k) {
    d[k - 1] = d[k + 1] + 2.0 * static_cast<double>(k) * coeffs_[k];
    if (k == 1) break;
  }
  d[0] *= 0.5;
  const double scale = 2.0 / (b_ - a_);
  for (std::size_t k = 0; k < nc; ++k) deriv_coeffs_[k] = d[k] * scale;
}

double ChebyshevSeries::clenshaw(const std::vector<double>& c, double t) {
  return chebyshev_sum(c, t);
}

double ChebyshevSeries::operator()(double x) const {
  return clenshaw(coeffs_, (2.0 * x - a_ - b_) / (b_ - a_));
}

double ChebyshevSeries::derivative(double x) const {
  return clenshaw(deriv_coeffs_, (2.0 * x - a_ - b_) / (b_ - a_));
}

// ---------------------------------------------------------------------------

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw Error(ErrorCode::InvalidArgument, "monotone interpolant needs at least two matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "interpolation abscissae must increase strictly");
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    // Weighted harmonic mean (Fritsch-Butland form of Fritsch-Carlson).
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::fabs(s) > std::fabs(3.0 * d0)) return 3.0 * d0;
    return s;
  };
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3 < n ? n - 3 : 0], delta[n - 2], delta[n - 3 < n ? n - 3 : 0]);
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

}  // namespace mdnf
