#pragma once

// Closed-form scalar fields f(x, y) given as text.
//
// Grammar (whitespace is insignificant):
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)?
//   exponent := '-' exponent | power          (must not reference x or y)
//   primary  := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
//   func     := exp | log | sqrt | sin | cos | tanh | cosh | sinh
//
// '^' binds tightest and is right-associative, so "-x^2" is -(x^2) and
// "2^3^2" is 2^(3^2).  Non-smooth functions (abs, sign, floor, ...) are
// rejected at parse time.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "mdnf/jet.hpp"

namespace mdnf {

inline constexpr std::size_t kDefaultMaxExpressionLength = 64 * 1024;

class ScalarExpression {
 public:
  // Throws SyntaxError, or Error with UnknownIdentifier / EmptyInput.
  static ScalarExpression parse(std::string_view text,
                                std::size_t max_length = kDefaultMaxExpressionLength);

  static ScalarExpression constant(double value);

  // Throws Error(DomainError) naming the offending subexpression.
  double evaluate(double x, double y) const;

  // Exact forward-mode propagation of all partials up to order N.  Throws
  // DomainError, or NonDifferentiable where a derivative does not exist.
  template <int N>
  Jet<N> evaluate_jet(double x, double y) const;

  Jet2 evaluate_jet2(double x, double y) const { return to_jet2(evaluate_jet<2>(x, y)); }

  // Canonical text; parsing it reproduces a structurally equal expression.
  std::string to_string() const;

  // Text this expression was parsed from (or to_string() for derived ones).
  const std::string& source() const;

  bool structurally_equal(const ScalarExpression& other) const;

  // sign * (e(x, reflect_y ? -y : y) - shift), with sign = -1 when negate.
  ScalarExpression transformed(bool reflect_y, double shift, bool negate) const;

  std::size_t node_count() const;

  struct Impl;

 private:
  explicit ScalarExpression(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

inline ScalarExpression parse_expression(std::string_view text,
                                         std::size_t max_length = kDefaultMaxExpressionLength) {
  return ScalarExpression::parse(text, max_length);
}

inline double evaluate(const ScalarExpression& e, double x, double y) {
  return e.evaluate(x, y);
}

inline Jet2 evaluate_jet2(const ScalarExpression& e, double x, double y) {
  return e.evaluate_jet2(x, y);
}

extern template Jet<2> ScalarExpression::evaluate_jet<2>(double, double) const;
extern template Jet<3> ScalarExpression::evaluate_jet<3>(double, double) const;

}  // namespace mdnf
