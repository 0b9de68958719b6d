#include "mdnf/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <type_traits>
#include <cctype>
#include <vector>

#include "mdnf/error.hpp"

namespace mdnf {

namespace {

enum class Kind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Log, Sqrt, Sin, Cos, Tanh, Cosh, Sinh };

struct Node {
  Kind kind = Kind::Number;
  double value = 0.0;  // literal, or the constant exponent of Pow
  int lhs = -1;
  int rhs = -1;
  Func func = Func::Exp;

  bool operator==(const Node&) const = default;
};

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 8> kFunctions{{{"exp", Func::Exp},
                                              {"log", Func::Log},
                                              {"sqrt", Func::Sqrt},
                                              {"sin", Func::Sin},
                                              {"cos", Func::Cos},
                                              {"tanh", Func::Tanh},
                                              {"cosh", Func::Cosh},
                                              {"sinh", Func::Sinh}}};

constexpr std::array<std::string_view, 8> kRejected{"abs", "sign", "floor", "ceil",
                                                     "min", "max", "round", "fabs"};

std::string_view func_name(Func f) {
  for (const auto& entry : kFunctions)
    if (entry.func == f) return entry.name;
  return "?";
}

constexpr int kMaxDepth = 256;

}  // namespace

// Nodes are stored in post-order: children always precede their parent, so
// the vector doubles as an evaluation tape with the root in the last slot.
struct ScalarExpression::Impl {
  std::vector<Node> nodes;
  std::string source;
};

namespace {

using Impl = ScalarExpression::Impl;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void unparse(const std::vector<Node>& nodes, int i, std::string& out) {
  const Node& n = nodes[i];
  auto child = [&](int c, bool parens) {
    if (parens) out += '(';
    unparse(nodes, c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case Kind::Number:
      out += format_number(n.value);
      return;
    case Kind::VarX:
      out += 'x';
      return;
    case Kind::VarY:
      out += 'y';
      return;
    case Kind::Neg:
      out += '-';
      child(n.lhs, precedence(nodes[n.lhs]) < 3);
      return;
    case Kind::Call:
      out += func_name(n.func);
      child(n.lhs, true);
      return;
    case Kind::Pow: {
      child(n.lhs, precedence(nodes[n.lhs]) <= 4);
      out += '^';
      if (n.value < 0) {
        out += '-';
        out += format_number(-n.value);
      } else {
        out += format_number(n.value);
      }
      return;
    }
    default: {
      const int p = precedence(n);
      child(n.lhs, precedence(nodes[n.lhs]) < p);
      out += n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-' : n.kind == Kind::Mul ? '*' : '/';
      child(n.rhs, precedence(nodes[n.rhs]) <= p);
      return;
    }
  }
}

std::string subexpression_text(const std::vector<Node>& nodes, int i) {
  std::string s;
  unparse(nodes, i, s);
  return s;
}

[[noreturn]] void domain_error(const std::vector<Node>& nodes, int i, const char* why) {
  throw Error(ErrorCode::DomainError,
              std::string("domain error in '") + subexpression_text(nodes, i) + "': " + why);
}

[[noreturn]] void non_differentiable(const std::vector<Node>& nodes, int i, const char* why) {
  throw Error(ErrorCode::NonDifferentiable,
              std::string("'") + subexpression_text(nodes, i) + "' is not differentiable here: " + why);
}

bool is_integer_exponent(double r) {
  return r == std::floor(r) && std::fabs(r) <= 1 << 30;
}

double eval_constant(const std::vector<Node>& nodes);

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, std::vector<Node>& nodes) : text_(text), nodes_(nodes) {}

  void parse_all() {
    skip_ws();
    if (pos_ == text_.size())
      throw Error(ErrorCode::EmptyInput, "expression is empty");
    parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      fail("an operator or end of input", "unexpected '" + std::string(1, text_[pos_]) + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& expected, const std::string& what) {
    throw SyntaxError(pos_, expected,
                      "syntax error at offset " + std::to_string(pos_) + ": " + what +
                          " (expected " + expected + ")");
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  int push(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.fail("a shallower expression", "expression nested too deeply");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  int parse_expr() {
    DepthGuard guard(*this);
    int lhs = parse_term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        int rhs = parse_term();
        lhs = push({Kind::Add, 0.0, lhs, rhs});
      } else if (peek('-')) {
        ++pos_;
        int rhs = parse_term();
        lhs = push({Kind::Sub, 0.0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    while (true) {
      if (peek('*')) {
        ++pos_;
        int rhs = parse_unary();
        lhs = push({Kind::Mul, 0.0, lhs, rhs});
      } else if (peek('/')) {
        ++pos_;
        int rhs = parse_unary();
        lhs = push({Kind::Div, 0.0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    DepthGuard guard(*this);
    if (peek('-')) {
      ++pos_;
      int operand = parse_unary();
      return push({Kind::Neg, 0.0, operand});
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (!peek('^')) return base;
    ++pos_;
    skip_ws();
    const std::size_t exponent_offset = pos_;
    const std::size_t first = nodes_.size();
    parse_exponent();
    for (std::size_t k = first; k < nodes_.size(); ++k) {
      if (nodes_[k].kind == Kind::VarX || nodes_[k].kind == Kind::VarY) {
        pos_ = exponent_offset;
        fail("a constant exponent", "exponent depends on x or y");
      }
    }
    std::vector<Node> sub(nodes_.begin() + static_cast<std::ptrdiff_t>(first), nodes_.end());
    for (auto& n : sub) {
      if (n.lhs >= 0) n.lhs -= static_cast<int>(first);
      if (n.rhs >= 0) n.rhs -= static_cast<int>(first);
    }
    nodes_.resize(first);
    const double r = eval_constant(sub);
    if (!std::isfinite(r)) {
      pos_ = exponent_offset;
      fail("a finite exponent", "exponent is not finite");
    }
    return push({Kind::Pow, r, base});
  }

  int parse_exponent() {
    DepthGuard guard(*this);
    if (peek('-')) {
      ++pos_;
      int operand = parse_exponent();
      return push({Kind::Neg, 0.0, operand});
    }
    return parse_power();
  }

  int parse_primary() {
    DepthGuard guard(*this);
    skip_ws();
    static const std::string kExpected = "a number, 'x', 'y', a function call, '(' or '-'";
    if (pos_ == text_.size()) fail(kExpected, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!peek(')')) fail("')'", pos_ == text_.size() ? "unexpected end of input" : "unbalanced parenthesis");
      ++pos_;
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(kExpected, std::string("unexpected '") + c + "'");
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) {
      pos_ = start;
      fail("a digit", "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark;
        fail("exponent digits", "malformed number exponent");
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("a representable number", "number out of range");
    }
    return push({Kind::Number, value});
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return push({Kind::VarX});
    if (name == "y") return push({Kind::VarY});
    for (const auto& entry : kFunctions) {
      if (entry.name == name) {
        if (!peek('(')) fail("'('", "function '" + std::string(name) + "' requires an argument list");
        ++pos_;
        int arg = parse_expr();
        if (!peek(')')) fail("')'", "unterminated argument list");
        ++pos_;
        return push({Kind::Call, 0.0, arg, -1, entry.func});
      }
    }
    for (auto rejected : kRejected) {
      if (rejected == name)
        throw Error(ErrorCode::UnknownIdentifier,
                    "non-smooth function '" + std::string(name) + "' at offset " +
                        std::to_string(start) + " is not supported");
    }
    throw Error(ErrorCode::UnknownIdentifier,
                "unknown identifier '" + std::string(name) + "' at offset " + std::to_string(start) +
                    " (only x and y are variables)");
  }

  std::string_view text_;
  std::vector<Node>& nodes_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

struct DoubleOps {
  using T = double;
  static T constant(double v) { return v; }
  static T var_x(double x) { return x; }
  static T var_y(double y) { return y; }
  static double value(T v) { return v; }
};

template <int N>
struct JetOps {
  using T = Jet<N>;
  static T constant(double v) { return T::constant(v); }
  static T var_x(double x) { return T::variable_x(x); }
  static T var_y(double y) { return T::variable_y(y); }
  static double value(const T& v) { return v.value(); }
};

double apply_double(const std::vector<Node>& nodes, int i, const Node& n, double a) {
  switch (n.func) {
    case Func::Exp:
      return std::exp(a);
    case Func::Log:
      if (!(a > 0.0)) domain_error(nodes, i, "log of a non-positive value");
      return std::log(a);
    case Func::Sqrt:
      if (a < 0.0) domain_error(nodes, i, "sqrt of a negative value");
      return std::sqrt(a);
    case Func::Sin:
      return std::sin(a);
    case Func::Cos:
      return std::cos(a);
    case Func::Tanh:
      return std::tanh(a);
    case Func::Cosh:
      return std::cosh(a);
    case Func::Sinh:
      return std::sinh(a);
  }
  return 0.0;
}

double pow_double(const std::vector<Node>& nodes, int i, double a, double r) {
  if (is_integer_exponent(r)) {
    if (r < 0 && a == 0.0) domain_error(nodes, i, "zero raised to a negative power");
    return std::pow(a, r);
  }
  if (a < 0.0) domain_error(nodes, i, "negative base with a non-integer exponent");
  if (a == 0.0 && r < 0) domain_error(nodes, i, "zero raised to a negative power");
  return std::pow(a, r);
}

template <int N>
std::array<double, N + 1> taylor_power(double a0, double r) {
  // binom(r, k) * a0^(r - k)
  std::array<double, N + 1> t{};
  double coef = 1.0;
  for (int k = 0; k <= N; ++k) {
    t[k] = coef * std::pow(a0, r - k);
    coef *= (r - k) / (k + 1);
  }
  return t;
}

template <int N>
Jet<N> reciprocal(const std::vector<Node>& nodes, int i, const Jet<N>& b) {
  const double b0 = b.value();
  if (b0 == 0.0) domain_error(nodes, i, "division by zero");
  std::array<double, N + 1> t{};
  double p = 1.0 / b0;
  for (int k = 0; k <= N; ++k) {
    t[k] = (k % 2 == 0 ? 1.0 : -1.0) * p;
    p /= b0;
  }
  return b.compose(t);
}

template <int N>
Jet<N> int_power(Jet<N> base, long n) {
  Jet<N> result = Jet<N>::constant(1.0);
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

template <int N>
Jet<N> pow_jet(const std::vector<Node>& nodes, int i, const Jet<N>& a, double r, bool is_sqrt) {
  const double a0 = a.value();
  if (is_integer_exponent(r) && !is_sqrt) {
    const long n = static_cast<long>(r);
    if (n >= 0) return int_power(a, n);
    if (a0 == 0.0) domain_error(nodes, i, "zero raised to a negative power");
    return reciprocal(nodes, i, int_power(a, -n));
  }
  if (a0 < 0.0)
    domain_error(nodes, i, is_sqrt ? "sqrt of a negative value" : "negative base with a non-integer exponent");
  if (a0 == 0.0) {
    if (r < 0) domain_error(nodes, i, "zero raised to a negative power");
    if (!a.is_constant()) non_differentiable(nodes, i, "fractional power at zero");
    return Jet<N>::constant(0.0);
  }
  return a.compose(taylor_power<N>(a0, r));
}

template <int N>
Jet<N> apply_jet(const std::vector<Node>& nodes, int i, const Node& n, const Jet<N>& a) {
  const double a0 = a.value();
  std::array<double, N + 1> t{};
  double inv_fact = 1.0;
  switch (n.func) {
    case Func::Exp: {
      const double e = std::exp(a0);
      for (int k = 0; k <= N; ++k) {
        t[k] = e * inv_fact;
        inv_fact /= k + 1;
      }
      return a.compose(t);
    }
    case Func::Log: {
      if (!(a0 > 0.0)) domain_error(nodes, i, "log of a non-positive value");
      t[0] = std::log(a0);
      double p = 1.0 / a0;
      for (int k = 1; k <= N; ++k) {
        t[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
        p /= a0;
      }
      return a.compose(t);
    }
    case Func::Sqrt:
      return pow_jet(nodes, i, a, 0.5, true);
    case Func::Sin:
    case Func::Cos: {
      const double s = std::sin(a0);
      const double c = std::cos(a0);
      // derivatives cycle sin, cos, -sin, -cos
      const std::array<double, 4> cycle = n.func == Func::Sin ? std::array<double, 4>{s, c, -s, -c}
                                                             : std::array<double, 4>{c, -s, -c, s};
      for (int k = 0; k <= N; ++k) {
        t[k] = cycle[k % 4] * inv_fact;
        inv_fact /= k + 1;
      }
      return a.compose(t);
    }
    case Func::Sinh:
    case Func::Cosh: {
      const double sh = std::sinh(a0);
      const double ch = std::cosh(a0);
      for (int k = 0; k <= N; ++k) {
        const bool even = k % 2 == 0;
        t[k] = ((n.func == Func::Sinh) == even ? sh : ch) * inv_fact;
        inv_fact /= k + 1;
      }
      return a.compose(t);
    }
    case Func::Tanh: {
      // d^k/da^k tanh = P_k(tanh a) with P_{k+1} = P_k' * (1 - T^2).
      const double th = std::tanh(a0);
      std::array<double, N + 2> poly{};  // coefficients of P_k in powers of T
      std::array<double, N + 4> next{};
      poly[1] = 1.0;                      // P_0 = T
      for (int k = 0; k <= N; ++k) {
        double v = 0.0;
        for (int d = static_cast<int>(poly.size()) - 1; d >= 0; --d) v = v * th + poly[d];
        t[k] = v * inv_fact;
        inv_fact /= k + 1;
        next.fill(0.0);
        for (int d = 1; d < static_cast<int>(poly.size()); ++d) {
          next[d - 1] += d * poly[d];
          next[d + 1] -= d * poly[d];
        }
        for (int d = 0; d < static_cast<int>(poly.size()); ++d) poly[d] = next[d];
      }
      return a.compose(t);
    }
  }
  return a;
}

template <class Ops>
typename Ops::T run(const std::vector<Node>& nodes, double x, double y) {
  using T = typename Ops::T;
  constexpr std::size_t kInline = 48;
  std::array<T, kInline> inline_regs;
  std::vector<T> heap_regs;
  T* regs = inline_regs.data();
  if (nodes.size() > kInline) {
    heap_regs.resize(nodes.size());
    regs = heap_regs.data();
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& n = nodes[k];
    const int i = static_cast<int>(k);
    T& out = regs[k];
    switch (n.kind) {
      case Kind::Number:
        out = Ops::constant(n.value);
        break;
      case Kind::VarX:
        out = Ops::var_x(x);
        break;
      case Kind::VarY:
        out = Ops::var_y(y);
        break;
      case Kind::Neg:
        out = -regs[n.lhs];
        break;
      case Kind::Add:
        out = regs[n.lhs] + regs[n.rhs];
        break;
      case Kind::Sub:
        out = regs[n.lhs] - regs[n.rhs];
        break;
      case Kind::Mul:
        out = regs[n.lhs] * regs[n.rhs];
        break;
      case Kind::Div:
        if constexpr (std::is_same_v<T, double>) {
          if (regs[n.rhs] == 0.0) domain_error(nodes, i, "division by zero");
          out = regs[n.lhs] / regs[n.rhs];
        } else {
          out = regs[n.lhs] * reciprocal(nodes, i, regs[n.rhs]);
        }
        break;
      case Kind::Pow:
        if constexpr (std::is_same_v<T, double>)
          out = pow_double(nodes, i, regs[n.lhs], n.value);
        else
          out = pow_jet(nodes, i, regs[n.lhs], n.value, false);
        break;
      case Kind::Call:
        if constexpr (std::is_same_v<T, double>)
          out = apply_double(nodes, i, n, regs[n.lhs]);
        else
          out = apply_jet(nodes, i, n, regs[n.lhs]);
        break;
    }
    if (!std::isfinite(Ops::value(out))) domain_error(nodes, i, "result is not finite");
  }
  return regs[nodes.size() - 1];
}

// Appends a copy of the subtree rooted at `root` of `src` to `dst`, with y
// replaced by -y when requested.  Returns the new root index.
int copy_subtree(const std::vector<Node>& src, int root, std::vector<Node>& dst, bool reflect_y) {
  Node n = src[root];
  if (n.lhs >= 0) n.lhs = copy_subtree(src, n.lhs, dst, reflect_y);
  if (n.rhs >= 0) n.rhs = copy_subtree(src, n.rhs, dst, reflect_y);
  dst.push_back(n);
  int idx = static_cast<int>(dst.size()) - 1;
  if (reflect_y && n.kind == Kind::VarY) {
    dst.push_back({Kind::Neg, 0.0, idx});
    idx = static_cast<int>(dst.size()) - 1;
  }
  return idx;
}

double eval_constant(const std::vector<Node>& nodes) { return run<DoubleOps>(nodes, 0.0, 0.0); }

}  // namespace

ScalarExpression ScalarExpression::parse(std::string_view text, std::size_t max_length) {
  if (text.size() > max_length)
    throw SyntaxError(max_length, "a shorter expression",
                      "expression exceeds the maximum length of " + std::to_string(max_length) +
                          " bytes");
  auto impl = std::make_shared<Impl>();
  Parser(text, impl->nodes).parse_all();
  impl->source = std::string(text);
  return ScalarExpression(std::move(impl));
}

ScalarExpression ScalarExpression::constant(double value) {
  auto impl = std::make_shared<Impl>();
  impl->nodes.push_back({Kind::Number, value});
  impl->source = format_number(value);
  return ScalarExpression(std::move(impl));
}

double ScalarExpression::evaluate(double x, double y) const {
  return run<DoubleOps>(impl_->nodes, x, y);
}

template <int N>
Jet<N> ScalarExpression::evaluate_jet(double x, double y) const {
  return run<JetOps<N>>(impl_->nodes, x, y);
}

template Jet<1> ScalarExpression::evaluate_jet<1>(double, double) const;
template Jet<2> ScalarExpression::evaluate_jet<2>(double, double) const;
template Jet<3> ScalarExpression::evaluate_jet<3>(double, double) const;

std::string ScalarExpression::to_string() const {
  return subexpression_text(impl_->nodes, static_cast<int>(impl_->nodes.size()) - 1);
}

const std::string& ScalarExpression::source() const { return impl_->source; }

bool ScalarExpression::structurally_equal(const ScalarExpression& other) const {
  return impl_->nodes == other.impl_->nodes;
}

std::size_t ScalarExpression::node_count() const { return impl_->nodes.size(); }

ScalarExpression ScalarExpression::transformed(bool reflect_y, double shift, bool negate) const {
  auto impl = std::make_shared<Impl>();
  auto& out = impl->nodes;
  int root = copy_subtree(impl_->nodes, static_cast<int>(impl_->nodes.size()) - 1, out, reflect_y);
  if (shift != 0.0) {
    out.push_back({Kind::Number, shift});
    out.push_back({Kind::Sub, 0.0, root, static_cast<int>(out.size()) - 1});
    root = static_cast<int>(out.size()) - 1;
  }
  if (negate) out.push_back({Kind::Neg, 0.0, root});
  impl->source = subexpression_text(out, static_cast<int>(out.size()) - 1);
  return ScalarExpression(std::move(impl));
}

}  // namespace mdnf
