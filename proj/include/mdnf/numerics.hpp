#pragma once

// Numerical kernels shared by the chart construction: adaptive Gauss-Kronrod
// quadrature, bracketed root finding, monotone inversion, 2-D Newton
// inversion, central-difference Jacobians and two interpolants (Chebyshev
// series for smooth functions, monotone cubic Hermite for tabulated data).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "mdnf/error.hpp"

namespace mdnf {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

struct ToleranceConfig {
  double quad_tol = 1e-10;
  double root_tol = 1e-12;
  int newton_max_iter = 50;
  double fd_step = 1e-5;
  double verify_tol = 1e-6;

  // Throws InvalidArgument unless every field is strictly positive and
  // fd_step^2 stays above machine epsilon (below that a central difference
  // is dominated by rounding).
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod nodes on [-1, 1] (non-negative half) with the embedded
// 7-point Gauss weights.
inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One Gauss-Kronrod 15/7 panel.  V must support +, -, scalar * and be
// measured by `norm`.
template <class V, class F, class Norm>
Panel<V> gk15(F& g, double a, double b, Norm& norm) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const V center = g(c);
  V kronrod = center * kKronrodWeights[7];
  V gauss = center * kGaussWeights[3];
  for (int k = 0; k < 7; ++k) {
    const double dx = h * kKronrodNodes[k];
    const V lo = g(c - dx);
    const V hi = g(c + dx);
    const V sum = lo + hi;
    kronrod = kronrod + sum * kKronrodWeights[k];
    if (k % 2 == 1) gauss = gauss + sum * kGaussWeights[k / 2];
  }
  const V diff = kronrod - gauss;
  return Panel<V>{a, b, kronrod * h, norm(diff) * std::fabs(h)};
}

}  // namespace detail

// Globally adaptive GK15 quadrature for value types other than double
// (fixed-size arrays of partial derivatives, for instance).  Accepts when the
// summed error estimate is at most max(tol, tol * norm(value)).
template <class V, class F, class Norm>
V integrate_adaptive(F&& g, double a, double b, double tol, Norm&& norm, int max_panels = 500,
                     double* error_out = nullptr, std::size_t* evals_out = nullptr) {
  if (a == b) {
    if (error_out) *error_out = 0.0;
    if (evals_out) *evals_out = 0;
    return g(a) * 0.0;
  }
  std::priority_queue<detail::Panel<V>> panels;
  auto first = detail::gk15<V>(g, a, b, norm);
  V total = first.value;
  double err = first.error;
  std::size_t evals = 15;
  panels.push(first);
  while (err > std::max(tol, tol * norm(total))) {
    if (static_cast<int>(panels.size()) >= max_panels) {
      if (error_out) *error_out = err;
      if (evals_out) *evals_out = evals;
      throw MaxSubdivisionsError(norm(total), err,
                                 "quadrature panel budget exhausted (error estimate " +
                                     std::to_string(err) + ")");
    }
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<V>(g, worst.a, mid, norm);
    auto right = detail::gk15<V>(g, mid, worst.b, norm);
    evals += 30;
    total = total - worst.value + left.value + right.value;
    err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the rounding accumulated by the running updates.
  V sum = total * 0.0;
  double err_sum = 0.0;
  while (!panels.empty()) {
    sum = sum + panels.top().value;
    err_sum += panels.top().error;
    panels.pop();
  }
  if (error_out) *error_out = err_sum;
  if (evals_out) *evals_out = evals;
  return sum;
}

// |value - exact| <= max(tol, tol * |value|) for smooth g.  a > b gives the
// negated integral over [b, a].
template <class F>
QuadratureResult integrate_1d(F&& g, double a, double b, double tol, int max_panels = 500) {
  QuadratureResult r;
  r.value = integrate_adaptive<double>(
      g, a, b, tol, [](double v) { return std::fabs(v); }, max_panels, &r.error_estimate,
      &r.evaluations);
  return r;
}

// Brent's method.  Returns x with the final bracket narrower than tol.
// Throws NoBracket when g(a) and g(b) have the same strict sign.
double find_root_bracketed(const std::function<double(double)>& g, double a, double b, double tol,
                           int max_iter = 200);

// Solves F(x) = target for strictly increasing F on [lo, hi].  When
// monotone_samples > 0, F is sampled on that many points first and
// NonMonotoneDetected is raised on a decrease.
double invert_monotone(const std::function<double(double)>& F, double target, double lo, double hi,
                       double tol, int monotone_samples = 0);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

// Damped Newton iteration for map(P) = target.  `map_and_jacobian` returns
// the map value and its Jacobian at a point.  Iterates past `tol` while the
// residual keeps shrinking, so that converged results are accurate to
// rounding level.
using MapWithJacobian = std::function<std::pair<Vec2, Mat2>(const Vec2&)>;
Vec2 newton_invert_2d(const MapWithJacobian& map_and_jacobian, const Vec2& target,
                      const Vec2& guess, const NewtonOptions& options = {});

// Convenience overload with separate map and Jacobian callbacks.
Vec2 newton_invert_2d(const std::function<Vec2(const Vec2&)>& map,
                      const std::function<Mat2(const Vec2&)>& jacobian, const Vec2& target,
                      const Vec2& guess, const NewtonOptions& options = {});

// Central-difference Jacobian J[i][j] = d map_i / d x_j.
Mat2 fd_jacobian(const std::function<Vec2(const Vec2&)>& map, const Vec2& point, double h);

// Chebyshev interpolant on [a, b] built from values at Chebyshev-Lobatto
// points.  The node count doubles (reusing previous samples) until the
// trailing coefficients fall below tol relative to the largest one.
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;

  static ChebyshevSeries fit(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-14, std::size_t min_nodes = 17,
                             std::size_t max_nodes = 257);
  static ChebyshevSeries from_coefficients(std::vector<double> coeffs, double a, double b);

  // Antiderivative vanishing at the lower end of the interval.
  ChebyshevSeries antiderivative() const;

  double operator()(double x) const;
  double derivative(double x) const;

  double lower() const { return a_; }
  double upper() const { return b_; }
  std::size_t size() const { return coeffs_.size(); }
  bool converged() const { return converged_; }
  // Magnitude of the trailing coefficients relative to the largest one.
  double tail() const { return tail_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  static double clenshaw(const std::vector<double>& c, double t);
  void set_derivative();

  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> coeffs_;
  std::vector<double> deriv_coeffs_;
  bool converged_ = false;
  double tail_ = 0.0;
};

// Coefficients of the interpolant through values sampled at the Lobatto
// points t_k = cos(pi k / (n - 1)), k = 0..n-1.
std::vector<double> chebyshev_lobatto_coefficients(const std::vector<double>& values);

// Chebyshev sum sum_k c_k T_k(t) for t in [-1, 1].
double chebyshev_sum(const std::vector<double>& c, double t);

// Antiderivative coefficients on [-1, 1] vanishing at t = -1 (one more
// coefficient than the input).
std::vector<double> chebyshev_integral(const std::vector<double>& c);

// n-point Gauss-Legendre rule on [-1, 1]; exact for degree 2n - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(std::size_t n);

// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes; preserves
// monotonicity of the data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

}  // namespace mdnf
