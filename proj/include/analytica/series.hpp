#pragma once

// Univariate polynomials and rational functions in t over the rationals, and
// Taylor coefficients at t = 0 by power-series long division.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/rational.hpp"

namespace analytica {

// Coefficients in ascending powers of t, no trailing zeros. Empty is zero.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(RVec coefficients) : c_(std::move(coefficients)) { trim(); }
  static UniPoly constant(const Rational& a) { return UniPoly(RVec{a}); }
  // a + b t
  static UniPoly affine(const Rational& a, const Rational& b) { return UniPoly(RVec{a, b}); }

  bool is_zero() const noexcept { return c_.empty(); }
  // -1 for the zero polynomial.
  long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
  const RVec& coefficients() const noexcept { return c_; }
  Rational operator[](std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }

  // Index of the lowest nonzero coefficient; the zero polynomial has none.
  std::size_t valuation() const {
    std::size_t v = 0;
    while (v < c_.size() && c_[v] == 0) ++v;
    return v;
  }

  UniPoly shifted_down(std::size_t k) const {
    if (k > c_.size()) return {};
    return UniPoly(RVec(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end()));
  }

  Rational evaluate(const Rational& t) const {
    Rational acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * t + c_[k];
    return acc;
  }

  friend bool operator==(const UniPoly&, const UniPoly&) = default;

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    RVec out(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) out[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) out[k] += b.c_[k];
    return UniPoly(std::move(out));
  }

  friend UniPoly operator-(const UniPoly& a) {
    RVec out = a.c_;
    for (auto& x : out) x = -x;
    return UniPoly(std::move(out));
  }

  friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    RVec out(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return UniPoly(std::move(out));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  RVec c_;
};

// num / den with den != 0 and no common factor of t. Other common factors are
// left alone: they cannot vanish at t = 0, which is the only place we expand.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(UniPoly::constant(1)) {}
  explicit RationalFunction(UniPoly num) : num_(std::move(num)), den_(UniPoly::constant(1)) {}
  RationalFunction(UniPoly num, UniPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw PoleError("rational function with identically zero denominator", "");
    normalize();
  }

  const UniPoly& numerator() const noexcept { return num_; }
  const UniPoly& denominator() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_.is_zero(); }

  // True when the reduced denominator vanishes at t = 0.
  bool has_pole_at_zero() const { return den_[0] == 0; }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RationalFunction operator-(const RationalFunction& a) { return {-a.num_, a.den_}; }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-b);
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw PoleError("division by a function that vanishes identically on the line", "");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }

  RationalFunction pow(unsigned k) const {
    RationalFunction out;
    out.num_ = UniPoly::constant(1);
    RationalFunction base = *this;
    while (k) {
      if (k & 1u) out = out * base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return out;
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = UniPoly::constant(1);
      return;
    }
    const std::size_t common = std::min(num_.valuation(), den_.valuation());
    if (common) {
      num_ = num_.shifted_down(common);
      den_ = den_.shifted_down(common);
    }
  }

  UniPoly num_;
  UniPoly den_;
};

// First order + 1 Taylor coefficients of f at t = 0.
inline RVec taylor_1d_series(const RationalFunction& f, unsigned order) {
  if (f.has_pole_at_zero()) {
    throw PoleError("non-analytic at origin along this line (pole of order " +
                        std::to_string(f.denominator().valuation()) + ")",
                    "t=0");
  }
  const UniPoly& num = f.numerator();
  const UniPoly& den = f.denominator();
  const Rational inv_lead = 1 / den[0];
  RVec s(order + 1, Rational(0));
  for (std::size_t k = 0; k <= order; ++k) {
    Rational acc = num[k];
    const std::size_t top = std::min<std::size_t>(k, static_cast<std::size_t>(std::max(0L, den.degree())));
    for (std::size_t j = 1; j <= top; ++j) acc -= den[j] * s[k - j];
    s[k] = acc * inv_lead;
  }
  return s;
}

}  // namespace analytica
