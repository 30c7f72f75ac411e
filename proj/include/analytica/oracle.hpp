#pragma once

// Function oracles: rational expressions in x1..xn parsed from text, with an
// exact (rational) and a binary64 evaluation path and an optional guard that
// overrides the expression at a single point.
//
// Grammar (standard precedence, power right-associative):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' factor)?
//   base   := number | var | '(' expr ')'
//   var    := 'x' digits        number := digits ('.' digits)?
// A quotient of integer literals such as 3/4 is an ordinary division and
// evaluates to the same exact rational. Exponents must be constant
// non-negative integers.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/rational.hpp"
#include "analytica/series.hpp"

namespace analytica {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { kConstant, kVariable, kNegate, kAdd, kSubtract, kMultiply, kDivide, kPower };

  Kind kind;
  Rational value;          // kConstant
  std::size_t index = 0;   // kVariable, zero-based
  unsigned exponent = 0;   // kPower
  NodePtr lhs;             // unary operand / left operand / power base
  NodePtr rhs;

  static NodePtr constant(Rational v) {
    return std::make_shared<const Node>(Node{Kind::kConstant, std::move(v), 0, 0, nullptr, nullptr});
  }
  static NodePtr variable(std::size_t i) {
    return std::make_shared<const Node>(Node{Kind::kVariable, 0, i, 0, nullptr, nullptr});
  }
  static NodePtr negate(NodePtr a) {
    return std::make_shared<const Node>(Node{Kind::kNegate, 0, 0, 0, std::move(a), nullptr});
  }
  static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    return std::make_shared<const Node>(Node{k, 0, 0, 0, std::move(a), std::move(b)});
  }
  static NodePtr power(NodePtr base, unsigned e) {
    return std::make_shared<const Node>(Node{Kind::kPower, 0, 0, e, std::move(base), nullptr});
  }
};

inline bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Node::Kind::kConstant: return a->value == b->value;
    case Node::Kind::kVariable: return a->index == b->index;
    case Node::Kind::kNegate: return structurally_equal(a->lhs, b->lhs);
    case Node::Kind::kPower: return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

class Expression {
 public:
  Expression(NodePtr root, std::size_t n) : root_(std::move(root)), n_(n) {
    if (!root_) throw Error("empty expression");
    if (n_ == 0) throw DimensionError("expression dimension must be positive");
  }

  const NodePtr& root() const noexcept { return root_; }
  std::size_t dimension() const noexcept { return n_; }

  friend bool operator==(const Expression& a, const Expression& b) {
    return a.n_ == b.n_ && structurally_equal(a.root_, b.root_);
  }

 private:
  NodePtr root_;
  std::size_t n_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError("syntax error: " + what, at);
  }
  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Node::binary(Node::Kind::kAdd, lhs, term());
      } else if (accept('-')) {
        lhs = Node::binary(Node::Kind::kSubtract, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = Node::binary(Node::Kind::kMultiply, lhs, factor());
      } else if (accept('/')) {
        lhs = Node::binary(Node::Kind::kDivide, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return Node::negate(factor());
    NodePtr b = base();
    if (accept('^')) {
      skip_space();
      const std::size_t exponent_at = pos_;
      NodePtr e = factor();
      return Node::power(b, constant_exponent(e, exponent_at));
    }
    return b;
  }

  unsigned constant_exponent(const NodePtr& e, std::size_t at) const;

  NodePtr base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      const std::size_t frac = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == frac) fail("malformed decimal literal", start);
    }
    const std::string_view literal = text_.substr(start, pos_ - start);
    if (literal == ".") fail("malformed decimal literal", start);
    return Node::constant(parse_rational(literal));
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    const bool is_var = name.size() >= 2 && name[0] == 'x' &&
                        name.find_first_not_of("0123456789", 1) == std::string_view::npos;
    if (!is_var) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    const unsigned long index = name.size() > 10 ? 0 : std::stoul(std::string(name.substr(1)));
    if (index == 0 || index > n_) {
      throw ParseError("variable '" + std::string(name) + "' out of range for n = " + std::to_string(n_),
                       start);
    }
    return Node::variable(index - 1);
  }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

inline bool has_variables(const NodePtr& e) {
  if (!e) return false;
  if (e->kind == Node::Kind::kVariable) return true;
  return has_variables(e->lhs) || has_variables(e->rhs);
}

}  // namespace detail

inline Rational evaluate(const NodePtr& e, std::span<const Rational> x);

inline unsigned detail::Parser::constant_exponent(const NodePtr& e, std::size_t at) const {
  if (has_variables(e)) throw ParseError("exponent must be a constant", at);
  Rational v;
  try {
    v = evaluate(e, std::span<const Rational>{});
  } catch (const PoleError&) {
    throw ParseError("exponent divides by zero", at);
  }
  if (v < 0) throw ParseError("negative exponent", at);
  if (v.get_den() != 1) throw ParseError("fractional exponent", at);
  if (v > 4096) throw ParseError("exponent too large", at);
  return static_cast<unsigned>(v.get_num().get_ui());
}

inline Expression parse_expression(std::string_view text, std::size_t n) {
  if (n == 0) throw DimensionError("expression dimension must be positive");
  return Expression(detail::Parser(text, n).parse(), n);
}

namespace detail {

inline int precedence(const Node& e) {
  switch (e.kind) {
    case Node::Kind::kAdd:
    case Node::Kind::kSubtract: return 1;
    case Node::Kind::kMultiply:
    case Node::Kind::kDivide: return 2;
    case Node::Kind::kNegate: return 3;
    case Node::Kind::kPower: return 4;
    default: return 5;
  }
}

// Exact decimal when the denominator is 2^a 5^b, "(p/q)" otherwise.
inline std::string print_constant(const Rational& v) {
  if (v.get_den() == 1) return v.get_num().get_str();
  mpz_class den = v.get_den();
  unsigned twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) return "(" + v.get_str() + ")";
  const unsigned digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = v.get_num() * scale / v.get_den();
  std::string s = mpz_class(abs(scaled)).get_str();
  if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return (scaled < 0 ? "-" : "") + s;
}

inline std::string print(const NodePtr& e) {
  auto wrap = [](const NodePtr& child, bool parens) {
    return parens ? "(" + print(child) + ")" : print(child);
  };
  const int p = precedence(*e);
  switch (e->kind) {
    case Node::Kind::kConstant: {
      std::string s = print_constant(e->value);
      return s[0] == '-' ? "(" + s + ")" : s;
    }
    case Node::Kind::kVariable: return "x" + std::to_string(e->index + 1);
    case Node::Kind::kNegate: return "-" + wrap(e->lhs, precedence(*e->lhs) < p);
    case Node::Kind::kPower:
      return wrap(e->lhs, precedence(*e->lhs) <= p) + "^" + std::to_string(e->exponent);
    default: {
      const char* op = e->kind == Node::Kind::kAdd        ? " + "
                       : e->kind == Node::Kind::kSubtract ? " - "
                       : e->kind == Node::Kind::kMultiply ? "*"
                                                          : "/";
      const bool right_parens = precedence(*e->rhs) <= p || e->rhs->kind == Node::Kind::kNegate;
      return wrap(e->lhs, precedence(*e->lhs) < p) + op + wrap(e->rhs, right_parens);
    }
  }
}

}  // namespace detail

// Canonical text form; parse_expression(print_expression(e), n) == e for any
// expression whose constants are integers or terminating decimals.
inline std::string print_expression(const Expression& e) { return detail::print(e.root()); }

inline Rational evaluate(const NodePtr& e, std::span<const Rational> x) {
  switch (e->kind) {
    case Node::Kind::kConstant: return e->value;
    case Node::Kind::kVariable:
      if (e->index >= x.size()) throw DimensionError("variable index beyond point length");
      return x[e->index];
    case Node::Kind::kNegate: return -evaluate(e->lhs, x);
    case Node::Kind::kAdd: return evaluate(e->lhs, x) + evaluate(e->rhs, x);
    case Node::Kind::kSubtract: return evaluate(e->lhs, x) - evaluate(e->rhs, x);
    case Node::Kind::kMultiply: return evaluate(e->lhs, x) * evaluate(e->rhs, x);
    case Node::Kind::kDivide: {
      const Rational d = evaluate(e->rhs, x);
      if (d == 0) throw PoleError("division by zero", to_string(x));
      return evaluate(e->lhs, x) / d;
    }
    case Node::Kind::kPower: return power(evaluate(e->lhs, x), e->exponent);
  }
  throw Error("corrupt expression node");
}

inline std::string to_string_doubles(std::span<const double> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    out += (i ? "," : "") + std::string(buf);
  }
  return out + ")";
}

inline double evaluate(const NodePtr& e, std::span<const double> x) {
  switch (e->kind) {
    case Node::Kind::kConstant: return to_double(e->value);
    case Node::Kind::kVariable:
      if (e->index >= x.size()) throw DimensionError("variable index beyond point length");
      return x[e->index];
    case Node::Kind::kNegate: return -evaluate(e->lhs, x);
    case Node::Kind::kAdd: return evaluate(e->lhs, x) + evaluate(e->rhs, x);
    case Node::Kind::kSubtract: return evaluate(e->lhs, x) - evaluate(e->rhs, x);
    case Node::Kind::kMultiply: return evaluate(e->lhs, x) * evaluate(e->rhs, x);
    case Node::Kind::kDivide: {
      const double d = evaluate(e->rhs, x);
      if (d == 0.0) throw PoleError("division by zero", to_string_doubles(x));
      return evaluate(e->lhs, x) / d;
    }
    case Node::Kind::kPower: {
      const double b = evaluate(e->lhs, x);
      double out = 1;
      for (unsigned k = 0; k < e->exponent; ++k) out *= b;
      return out;
    }
  }
  throw Error("corrupt expression node");
}

// The restriction t -> e(base + t * direction) as an exact rational function.
inline RationalFunction restrict_to_line(const NodePtr& e, std::span<const Rational> base,
                                         std::span<const Rational> direction) {
  switch (e->kind) {
    case Node::Kind::kConstant: return RationalFunction(UniPoly::constant(e->value));
    case Node::Kind::kVariable:
      return RationalFunction(UniPoly::affine(base[e->index], direction[e->index]));
    case Node::Kind::kNegate: return -restrict_to_line(e->lhs, base, direction);
    case Node::Kind::kAdd:
      return restrict_to_line(e->lhs, base, direction) + restrict_to_line(e->rhs, base, direction);
    case Node::Kind::kSubtract:
      return restrict_to_line(e->lhs, base, direction) - restrict_to_line(e->rhs, base, direction);
    case Node::Kind::kMultiply:
      return restrict_to_line(e->lhs, base, direction) * restrict_to_line(e->rhs, base, direction);
    case Node::Kind::kDivide: {
      const RationalFunction d = restrict_to_line(e->rhs, base, direction);
      if (d.is_zero()) {
        throw PoleError("denominator vanishes identically on the line",
                        to_string(base) + "+t*" + to_string(direction));
      }
      return restrict_to_line(e->lhs, base, direction) / d;
    }
    case Node::Kind::kPower: return restrict_to_line(e->lhs, base, direction).pow(e->exponent);
  }
  throw Error("corrupt expression node");
}

// Replaces every x_i by replacements[i].
inline NodePtr substitute(const NodePtr& e, const std::vector<NodePtr>& replacements) {
  switch (e->kind) {
    case Node::Kind::kConstant: return e;
    case Node::Kind::kVariable: return replacements.at(e->index);
    case Node::Kind::kNegate: return Node::negate(substitute(e->lhs, replacements));
    case Node::Kind::kPower: return Node::power(substitute(e->lhs, replacements), e->exponent);
    default:
      return Node::binary(e->kind, substitute(e->lhs, replacements), substitute(e->rhs, replacements));
  }
}

// No division by anything that depends on a variable or vanishes.
inline bool is_polynomial(const NodePtr& e) {
  if (!e) return true;
  if (e->kind == Node::Kind::kDivide) {
    if (detail::has_variables(e->rhs)) return false;
    try {
      if (evaluate(e->rhs, std::span<const Rational>{}) == 0) return false;
    } catch (const PoleError&) {
      return false;
    }
  }
  return is_polynomial(e->lhs) && is_polynomial(e->rhs);
}

struct Guard {
  RVec point;
  Rational value;
};

enum class EvalMode { kExact, kFloat };

class FunctionOracle {
 public:
  FunctionOracle(Expression expression, std::optional<Guard> guard = std::nullopt)
      : expression_(std::move(expression)), guard_(std::move(guard)) {
    if (guard_ && guard_->point.size() != expression_.dimension()) {
      throw DimensionError("guard point length differs from oracle dimension");
    }
    if (guard_) guard_point_d_ = to_doubles(guard_->point);
    polynomial_core_ = is_polynomial(expression_.root());
  }

  const Expression& expression() const noexcept { return expression_; }
  std::size_t dimension() const noexcept { return expression_.dimension(); }
  const std::optional<Guard>& guard() const noexcept { return guard_; }

  // The oracle is a polynomial, possibly pulled back through an inversion;
  // then it is analytic everywhere except at the inversion center.
  bool polynomial_core() const noexcept { return polynomial_core_; }
  const std::optional<RVec>& inversion_center() const noexcept { return inversion_center_; }

  Rational evaluate_exact(std::span<const Rational> p) const {
    check_length(p.size());
    if (guard_ && std::equal(p.begin(), p.end(), guard_->point.begin())) return guard_->value;
    return evaluate(expression_.root(), p);
  }

  // Guard matching compares the input bits against the guard point rounded
  // to binary64.
  double evaluate_float(std::span<const double> p) const {
    check_length(p.size());
    if (guard_ && std::equal(p.begin(), p.end(), guard_point_d_.begin())) return to_double(guard_->value);
    return evaluate(expression_.root(), p);
  }

  // Oracle for x -> this(map(x)) where map is written as one expression per
  // coordinate. Used for translations and inversions.
  FunctionOracle compose(const std::vector<NodePtr>& map, std::optional<Guard> new_guard) const {
    FunctionOracle out(Expression(substitute(expression_.root(), map), dimension()), std::move(new_guard));
    out.polynomial_core_ = polynomial_core_;
    out.inversion_center_ = inversion_center_;
    return out;
  }

 private:
  friend FunctionOracle translate(const FunctionOracle&, std::span<const Rational>);
  friend FunctionOracle pull_back_by_inversion(const FunctionOracle&, std::span<const Rational>);

  void check_length(std::size_t k) const {
    if (k != dimension()) {
      throw DimensionError("oracle in " + std::to_string(dimension()) + " variables evaluated at a point of length " +
                           std::to_string(k));
    }
  }

  Expression expression_;
  std::optional<Guard> guard_;
  std::vector<double> guard_point_d_;
  bool polynomial_core_ = false;
  std::optional<RVec> inversion_center_;
};

inline Rational evaluate_oracle(const FunctionOracle& f, std::span<const Rational> p) {
  return f.evaluate_exact(p);
}

inline double evaluate_oracle(const FunctionOracle& f, std::span<const double> p) {
  return f.evaluate_float(p);
}

// x -> f(x + offset).
inline FunctionOracle translate(const FunctionOracle& f, std::span<const Rational> offset) {
  if (offset.size() != f.dimension()) throw DimensionError("translation length mismatch");
  std::vector<NodePtr> map;
  for (std::size_t i = 0; i < offset.size(); ++i) {
    map.push_back(offset[i] == 0 ? Node::variable(i)
                                 : Node::binary(Node::Kind::kAdd, Node::variable(i), Node::constant(offset[i])));
  }
  std::optional<Guard> g;
  if (f.guard()) g = Guard{f.guard()->point - RVec(offset.begin(), offset.end()), f.guard()->value};
  FunctionOracle out = f.compose(map, std::move(g));
  if (f.inversion_center()) out.inversion_center_ = *f.inversion_center() - RVec(offset.begin(), offset.end());
  return out;
}

// x -> f(mu_c(x)) with mu_c(x) = (x - c)/|x - c|^2 + c. A guard at c is
// sent to infinity and dropped; any other guard moves to mu_c(guard).
// Only defined for oracles without an earlier inversion.
inline FunctionOracle pull_back_by_inversion(const FunctionOracle& f, std::span<const Rational> center) {
  if (center.size() != f.dimension()) throw DimensionError("inversion center length mismatch");
  if (f.inversion_center()) throw Error("oracle is already an inversion pullback");
  const std::size_t n = f.dimension();
  std::vector<NodePtr> shifted;
  for (std::size_t i = 0; i < n; ++i) {
    shifted.push_back(center[i] == 0
                          ? Node::variable(i)
                          : Node::binary(Node::Kind::kSubtract, Node::variable(i), Node::constant(center[i])));
  }
  NodePtr norm = Node::power(shifted[0], 2);
  for (std::size_t i = 1; i < n; ++i) norm = Node::binary(Node::Kind::kAdd, norm, Node::power(shifted[i], 2));
  std::vector<NodePtr> map;
  for (std::size_t i = 0; i < n; ++i) {
    NodePtr q = Node::binary(Node::Kind::kDivide, shifted[i], norm);
    map.push_back(center[i] == 0 ? q : Node::binary(Node::Kind::kAdd, q, Node::constant(center[i])));
  }
  std::optional<Guard> g;
  if (f.guard()) {
    const RVec c(center.begin(), center.end());
    const RVec d = f.guard()->point - c;
    if (!is_zero(d)) g = Guard{(1 / norm2(d)) * d + c, f.guard()->value};
  }
  FunctionOracle out = f.compose(map, std::move(g));
  out.inversion_center_ = RVec(center.begin(), center.end());
  return out;
}

// Parses "p1,...,pn=v".
inline Guard parse_guard(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw Error("guard must look like \"x1,...,xn=value\"");
  return Guard{parse_point(text.substr(0, eq)), parse_rational(text.substr(eq + 1))};
}

// The counterexamples of the real Hartogs problem:
//   "hartogs-f": x1*...*xn / (x1^(2n) + ... + xn^(2n)), 0 at the origin (n >= 2)
//   "curve-g":   (x^8 + y(x^2-y^3)^2 + z^4) / (x^10 + (x^2-y^3)^2 + z^2), 0 at the origin (n = 3)
inline FunctionOracle builtin_counterexample(std::string_view name, std::size_t n) {
  std::string text;
  if (name == "hartogs-f") {
    if (n < 2) throw ConfigError("hartogs-f needs n >= 2");
    std::string num, den;
    for (std::size_t i = 1; i <= n; ++i) {
      num += (i > 1 ? "*x" : "x") + std::to_string(i);
      den += (i > 1 ? " + x" : "x") + std::to_string(i) + "^" + std::to_string(2 * n);
    }
    text = "(" + num + ")/(" + den + ")";
  } else if (name == "curve-g") {
    if (n != 3) throw ConfigError("curve-g is defined for n = 3 only");
    text = "(x1^8 + x2*(x1^2 - x2^3)^2 + x3^4)/(x1^10 + (x1^2 - x2^3)^2 + x3^2)";
  } else {
    throw ConfigError("unknown builtin '" + std::string(name) + "' (expected hartogs-f or curve-g)");
  }
  return FunctionOracle(parse_expression(text, n), Guard{zeros(n), 0});
}

}  // namespace analytica
