#pragma once

// Truncated bivariate Taylor polynomials for forward-mode differentiation.
//
// Jet<N> stores the Taylor coefficients c(i,j) = d^{i+j}f / (dx^i dy^j) / (i! j!)
// for all i + j <= N.  Arithmetic is exact truncated polynomial arithmetic,
// and an elementary function phi is applied by composing its Taylor series
// around the value with the nilpotent remainder of the argument.

#include <array>
#include <cmath>
#include <cstddef>

namespace mdnf {

template <int N>
class Jet {
  static_assert(N >= 0 && N <= 6, "jet order out of supported range");

 public:
  static constexpr int kOrder = N;
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  constexpr Jet() : c_{} {}

  static constexpr Jet constant(double v) {
    Jet j;
    j.c_[0] = v;
    return j;
  }

  // Independent variable x (or y) seeded at the given value.
  static constexpr Jet variable_x(double v) {
    Jet j = constant(v);
    if constexpr (N >= 1) j.c_[index(1, 0)] = 1.0;
    return j;
  }
  static constexpr Jet variable_y(double v) {
    Jet j = constant(v);
    if constexpr (N >= 1) j.c_[index(0, 1)] = 1.0;
    return j;
  }

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  constexpr double value() const { return c_[0]; }
  constexpr double coeff(int i, int j) const { return c_[index(i, j)]; }
  constexpr double& coeff(int i, int j) { return c_[index(i, j)]; }

  // Partial derivative d^{i+j} / dx^i dy^j.
  double partial(int i, int j) const {
    return coeff(i, j) * factorial(i) * factorial(j);
  }

  // True when every non-constant coefficient is zero.
  constexpr bool is_constant() const {
    for (int k = 1; k < kSize; ++k)
      if (c_[k] != 0.0) return false;
    return true;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (int k = 0; k < kSize; ++k) c_[k] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (int k = 0; k < kSize; ++k) a.c_[k] = -a.c_[k];
    return a;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int d1 = 0; d1 <= N; ++d1) {
      for (int j1 = 0; j1 <= d1; ++j1) {
        const double av = a.c_[index(d1 - j1, j1)];
        if (av == 0.0) continue;
        for (int d2 = 0; d1 + d2 <= N; ++d2) {
          for (int j2 = 0; j2 <= d2; ++j2) {
            r.c_[index(d1 - j1 + d2 - j2, j1 + j2)] += av * b.c_[index(d2 - j2, j2)];
          }
        }
      }
    }
    return r;
  }

  // Evaluates sum_k taylor[k] * (self - self.value())^k, i.e. phi(self) for a
  // function phi whose scaled derivatives phi^{(k)}(v)/k! are given.
  Jet compose(const std::array<double, N + 1>& taylor) const {
    Jet delta = *this;
    delta.c_[0] = 0.0;
    Jet r = constant(taylor[N]);
    for (int k = N - 1; k >= 0; --k) {
      r = r * delta;
      r.c_[0] += taylor[k];
    }
    return r;
  }

 private:
  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  std::array<double, kSize> c_;
};

// Second-order jet of a scalar field at a point, in derivative (not Taylor
// coefficient) form.
struct Jet2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;
};

template <int N>
Jet2 to_jet2(const Jet<N>& j) {
  static_assert(N >= 2);
  return Jet2{j.partial(0, 0), j.partial(1, 0), j.partial(0, 1),
              j.partial(2, 0), j.partial(1, 1), j.partial(0, 2)};
}

}  // namespace mdnf
