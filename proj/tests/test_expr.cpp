#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mdnf/error.hpp"
#include "mdnf/expr.hpp"

using mdnf::ErrorCode;
using mdnf::ScalarExpression;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const mdnf::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

struct Term {
  int c;
  int i;
  int j;
};

double ipow(double b, int e) { return e <= 0 ? 1.0 : std::pow(b, e); }

// d^a/dx^a d^b/dy^b of sum c x^i y^j.
double poly_partial(const std::vector<Term>& terms, int a, int b, double x, double y) {
  double s = 0.0;
  for (const Term& t : terms) {
    if (t.i < a || t.j < b) continue;
    double k = t.c;
    for (int r = 0; r < a; ++r) k *= t.i - r;
    for (int r = 0; r < b; ++r) k *= t.j - r;
    s += k * ipow(x, t.i - a) * ipow(y, t.j - b);
  }
  return s;
}

}  // namespace

TEST_CASE("parse and evaluate") {
  CHECK(ScalarExpression::parse("x^2+y").evaluate(1, 2) == doctest::Approx(3.0));
  CHECK(ScalarExpression::parse("exp(x)*(1+y)").evaluate(0, 0) == 1.0);
  CHECK(ScalarExpression::parse("x^2+y").evaluate(0.5, 0.1) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(ScalarExpression::parse("1").evaluate(-3.5, 7.25) == 1.0);
  CHECK(ScalarExpression::parse("-x^2").evaluate(3, 0) == -9.0);
  CHECK(ScalarExpression::parse("2^3^2").evaluate(0, 0) == 512.0);
  CHECK(ScalarExpression::parse("  sin( x ) * cos(y) + log(1+x)/sqrt(4) ").evaluate(0.3, 0.2) ==
        doctest::Approx(std::sin(0.3) * std::cos(0.2) + std::log(1.3) / 2).epsilon(1e-15));
  CHECK(ScalarExpression::parse("1.5e-1*x").evaluate(2, 0) == doctest::Approx(0.3));
}

TEST_CASE("syntax errors carry the offset") {
  try {
    (void)ScalarExpression::parse("x +* y");
    FAIL("no error");
  } catch (const mdnf::SyntaxError& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(e.offset() == 3);
    CHECK_FALSE(e.expected().empty());
  }
  try {
    (void)ScalarExpression::parse("x^2+");
    FAIL("no error");
  } catch (const mdnf::SyntaxError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK(code_of([] { (void)ScalarExpression::parse("(x+y"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { (void)ScalarExpression::parse("x y"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { (void)ScalarExpression::parse("x^y"); }) == ErrorCode::SyntaxError);
}

TEST_CASE("identifier and input errors") {
  CHECK(code_of([] { (void)ScalarExpression::parse("z+1"); }) == ErrorCode::UnknownIdentifier);
  CHECK(code_of([] { (void)ScalarExpression::parse("abs(x)"); }) == ErrorCode::UnknownIdentifier);
  CHECK(code_of([] { (void)ScalarExpression::parse(""); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { (void)ScalarExpression::parse("   "); }) == ErrorCode::EmptyInput);
}

TEST_CASE("domain errors") {
  const auto e = ScalarExpression::parse("sqrt(y)");
  CHECK(code_of([&] { (void)e.evaluate(0, -1); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { (void)e.evaluate_jet2(0, 0); }) == ErrorCode::NonDifferentiable);
  CHECK(e.evaluate(0, 4) == 2.0);
  const auto l = ScalarExpression::parse("log(x)");
  CHECK(code_of([&] { (void)l.evaluate(0, 0); }) == ErrorCode::DomainError);
  const auto d = ScalarExpression::parse("1/x");
  CHECK(code_of([&] { (void)d.evaluate(0, 0); }) == ErrorCode::DomainError);
}

TEST_CASE("second-order jets") {
  auto j = ScalarExpression::parse("x^2+y").evaluate_jet2(0, 0);
  CHECK(j.v == 0.0);
  CHECK(j.dx == 0.0);
  CHECK(j.dy == 1.0);
  CHECK(j.dxx == 2.0);
  CHECK(j.dxy == 0.0);
  CHECK(j.dyy == 0.0);

  j = ScalarExpression::parse("exp(x)").evaluate_jet2(0, 0);
  CHECK(j.v == 1.0);
  CHECK(j.dx == 1.0);
  CHECK(j.dy == 0.0);
  CHECK(j.dxx == 1.0);
  CHECK(j.dxy == 0.0);
  CHECK(j.dyy == 0.0);

  j = ScalarExpression::parse("x^2+y+x^3").evaluate_jet2(0.2, 0);
  CHECK(j.dxx == doctest::Approx(3.2).epsilon(1e-15));

  j = ScalarExpression::parse("exp(x)*(1+y)").evaluate_jet2(0.3, 0.5);
  CHECK(j.dxy == doctest::Approx(std::exp(0.3)).epsilon(1e-15));
  CHECK(j.dyy == 0.0);
}

TEST_CASE("random polynomial jets against the symbolic oracle") {
  std::mt19937 rng(20261019);
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<int> deg(0, 4);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Term> terms;
    std::string text;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      Term t{coeff(rng), deg(rng), deg(rng)};
      if (t.c == 0) t.c = 1;
      terms.push_back(t);
      if (k) text += "+";
      text += "(" + std::to_string(t.c) + ")*x^" + std::to_string(t.i) + "*y^" +
              std::to_string(t.j);
    }
    const double x = pt(rng);
    const double y = pt(rng);
    CAPTURE(text);
    const auto e = ScalarExpression::parse(text);
    const auto j = e.evaluate_jet2(x, y);
    const auto j3 = e.evaluate_jet<3>(x, y);
    auto close = [](double got, double want) {
      return std::fabs(got - want) <= 1e-12 * std::max(1.0, std::fabs(want));
    };
    CHECK(close(j.v, poly_partial(terms, 0, 0, x, y)));
    CHECK(close(j.dx, poly_partial(terms, 1, 0, x, y)));
    CHECK(close(j.dy, poly_partial(terms, 0, 1, x, y)));
    CHECK(close(j.dxx, poly_partial(terms, 2, 0, x, y)));
    CHECK(close(j.dxy, poly_partial(terms, 1, 1, x, y)));
    CHECK(close(j.dyy, poly_partial(terms, 0, 2, x, y)));
    CHECK(close(j3.partial(3, 0), poly_partial(terms, 3, 0, x, y)));
    CHECK(close(j3.partial(2, 1), poly_partial(terms, 2, 1, x, y)));
    CHECK(close(j3.partial(1, 2), poly_partial(terms, 1, 2, x, y)));
    CHECK(close(j3.partial(0, 3), poly_partial(terms, 0, 3, x, y)));
  }
}

TEST_CASE("jets of transcendental functions match finite differences") {
  const char* exprs[] = {"sin(x*y)+cos(x)", "exp(x)*(1+y)", "log(2+x+y^2)", "sqrt(1+x^2+y)",
                         "sin(x/3)-y/(1+x^2)", "(1+x)^2.5*y"};
  for (const char* s : exprs) {
    CAPTURE(s);
    const auto e = ScalarExpression::parse(s);
    const double x = 0.3;
    const double y = 0.2;
    const double h = 1e-4;
    const auto j = e.evaluate_jet2(x, y);
    auto f = [&](double a, double b) { return e.evaluate(a, b); };
    CHECK(j.dx == doctest::Approx((f(x + h, y) - f(x - h, y)) / (2 * h)).epsilon(1e-7));
    CHECK(j.dy == doctest::Approx((f(x, y + h) - f(x, y - h)) / (2 * h)).epsilon(1e-7));
    CHECK(j.dxx ==
          doctest::Approx((f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h)).epsilon(1e-5));
    CHECK(j.dxy == doctest::Approx((f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) +
                                    f(x - h, y - h)) /
                                   (4 * h * h))
                       .epsilon(1e-5));
  }
}

TEST_CASE("unparse round trip is a fixed point") {
  const char* exprs[] = {"x^2+y",        "x^2+y+x^3",  "2*y+x^2",     "exp(x)*(1+y)",
                         "-(x^2)-y",     "x--y",       "x-(y-1)",     "x/(y/2)",
                         "-x^2",         "(-x)^2",     "2^3^2",       "sin(x)^2+cos(y)^-1",
                         "1e-3*x*y",     "(x+y)*(x-y)", "sqrt(1+y)-log(1+x^2)"};
  for (const char* s : exprs) {
    CAPTURE(s);
    const auto e = ScalarExpression::parse(s);
    const std::string once = e.to_string();
    const auto again = ScalarExpression::parse(once);
    CHECK(again.structurally_equal(e));
    CHECK(again.to_string() == once);
    CHECK(again.evaluate(0.3, 0.2) == doctest::Approx(e.evaluate(0.3, 0.2)).epsilon(1e-15));
  }
}

TEST_CASE("transformed expressions") {
  const auto f = ScalarExpression::parse("x^2+y+1");
  const auto g = f.transformed(true, 1.0, true);  // -(f(x, -y) - 1)
  CHECK(g.evaluate(0.3, 0.2) == doctest::Approx(-(0.09 - 0.2)).epsilon(1e-15));
  CHECK(f.transformed(false, 0.0, false).evaluate(0.3, 0.2) == f.evaluate(0.3, 0.2));
  CHECK(ScalarExpression::constant(2.5).evaluate(1, 1) == 2.5);
  CHECK(f.node_count() > 1);
}
