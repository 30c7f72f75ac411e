#pragma once

// Homogeneous polynomials ("forms") with exact rational coefficients and
// graded towers of them.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/rational.hpp"

namespace analytica {

using MultiIndex = std::vector<unsigned>;

inline unsigned total_degree(const MultiIndex& m) {
  return std::accumulate(m.begin(), m.end(), 0u);
}

// Graded-lexicographic order, largest first: higher total degree first, then
// lexicographically larger exponent vectors first. For n = 2, d = 2 this gives
// x^2, xy, y^2.
struct GrlexFirst {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const unsigned da = total_degree(a);
    const unsigned db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

// All exponent vectors of length n and total degree d, graded-lex order.
inline std::vector<MultiIndex> monomial_basis(std::size_t n, unsigned d) {
  if (n == 0) throw DimensionError("monomial_basis needs n >= 1");
  std::vector<MultiIndex> out;
  MultiIndex current(n, 0);
  // Recursive fill: position i takes every value from the remaining budget
  // downwards, which yields lexicographically descending order.
  auto fill = [&](auto&& self, std::size_t i, unsigned remaining) -> void {
    if (i + 1 == n) {
      current[i] = remaining;
      out.push_back(current);
      return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
      current[i] = e;
      self(self, i + 1, remaining - e);
    }
  };
  fill(fill, 0, d);
  return out;
}

inline Rational binomial(unsigned n, unsigned k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

class HomogeneousForm {
 public:
  using Terms = std::map<MultiIndex, Rational, GrlexFirst>;

  // The zero form of the given shape.
  HomogeneousForm(std::size_t n, unsigned d) : n_(n), d_(d) {
    if (n == 0) throw DimensionError("form dimension must be positive");
  }

  HomogeneousForm(std::size_t n, unsigned d, Terms terms) : HomogeneousForm(n, d) {
    for (auto& [index, coefficient] : terms) add_term(index, coefficient);
  }

  static HomogeneousForm constant(std::size_t n, const Rational& c) {
    HomogeneousForm f(n, 0);
    f.add_term(MultiIndex(n, 0), c);
    return f;
  }

  // sum_i coefficients[i] * x_i
  static HomogeneousForm linear(std::span<const Rational> coefficients) {
    HomogeneousForm f(coefficients.size(), 1);
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      MultiIndex m(coefficients.size(), 0);
      m[i] = 1;
      f.add_term(m, coefficients[i]);
    }
    return f;
  }

  static HomogeneousForm monomial(const MultiIndex& index, const Rational& c = 1) {
    HomogeneousForm f(index.size(), total_degree(index));
    f.add_term(index, c);
    return f;
  }

  // Coefficients listed in monomial_basis(n, d) order.
  static HomogeneousForm from_dense(std::size_t n, unsigned d,
                                    std::span<const Rational> coefficients) {
    const auto basis = monomial_basis(n, d);
    if (basis.size() != coefficients.size()) {
      throw DimensionError("dense coefficient count does not match the basis");
    }
    HomogeneousForm f(n, d);
    for (std::size_t k = 0; k < basis.size(); ++k) f.add_term(basis[k], coefficients[k]);
    return f;
  }

  std::size_t dimension() const noexcept { return n_; }
  unsigned degree() const noexcept { return d_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  const Terms& terms() const noexcept { return terms_; }

  Rational coefficient(const MultiIndex& index) const {
    auto it = terms_.find(index);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  RVec dense() const {
    RVec out;
    for (const auto& m : monomial_basis(n_, d_)) out.push_back(coefficient(m));
    return out;
  }

  // The zero form compares equal to any other zero form of the same
  // dimension, whatever its declared degree.
  friend bool operator==(const HomogeneousForm& a, const HomogeneousForm& b) {
    if (a.n_ != b.n_) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.d_ == b.d_ && a.terms_ == b.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      std::vector<std::string> parts;
      const Rational a = abs(c);
      if (a != 1 || total_degree(m) == 0) parts.push_back(a.get_str());
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        parts.push_back("x" + std::to_string(i + 1) + (m[i] > 1 ? "^" + std::to_string(m[i]) : ""));
      }
      for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "*" : "") + parts[k];
    }
    return out;
  }

 private:
  friend HomogeneousForm operator+(const HomogeneousForm&, const HomogeneousForm&);
  friend HomogeneousForm operator*(const HomogeneousForm&, const HomogeneousForm&);

  void add_term(const MultiIndex& index, const Rational& c) {
    if (index.size() != n_) throw DimensionError("multi-index length differs from form dimension");
    if (total_degree(index) != d_) {
      throw DimensionError("term of degree " + std::to_string(total_degree(index)) +
                           " in a form of degree " + std::to_string(d_));
    }
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(index, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::size_t n_;
  unsigned d_;
  Terms terms_;
};

inline HomogeneousForm operator+(const HomogeneousForm& a, const HomogeneousForm& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("adding forms of different dimension");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.degree() != b.degree()) throw DimensionError("adding forms of different degree");
  HomogeneousForm out = a;
  for (const auto& [m, c] : b.terms()) out.add_term(m, c);
  return out;
}

inline HomogeneousForm operator*(const Rational& s, const HomogeneousForm& f) {
  HomogeneousForm::Terms terms;
  if (s != 0)
    for (const auto& [m, c] : f.terms()) terms.emplace(m, s * c);
  return HomogeneousForm(f.dimension(), f.degree(), std::move(terms));
}

inline HomogeneousForm operator-(const HomogeneousForm& a, const HomogeneousForm& b) {
  return a + Rational(-1) * b;
}

inline HomogeneousForm operator*(const HomogeneousForm& a, const HomogeneousForm& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("multiplying forms of different dimension");
  HomogeneousForm out(a.dimension(), a.degree() + b.degree());
  MultiIndex m(a.dimension());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  return out;
}

inline HomogeneousForm pow(const HomogeneousForm& f, unsigned k) {
  HomogeneousForm out = HomogeneousForm::constant(f.dimension(), 1);
  for (unsigned i = 0; i < k; ++i) out = out * f;
  return out;
}

inline Rational evaluate_form(const HomogeneousForm& f, std::span<const Rational> p) {
  if (p.size() != f.dimension()) {
    throw DimensionError("evaluating a form in " + std::to_string(f.dimension()) +
                         " variables at a point of length " + std::to_string(p.size()));
  }
  Rational sum = 0;
  for (const auto& [m, c] : f.terms()) {
    Rational term = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) term *= power(p[i], m[i]);
    sum += term;
  }
  return sum;
}

inline double evaluate_form(const HomogeneousForm& f, std::span<const double> p) {
  if (p.size() != f.dimension()) throw DimensionError("point length differs from form dimension");
  double sum = 0;
  for (const auto& [m, c] : f.terms()) {
    double term = to_double(c);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (unsigned e = 0; e < m[i]; ++e) term *= p[i];
    sum += term;
  }
  return sum;
}

// f(A y) for an n x k matrix A: the pullback of f along y -> A y. When the
// columns of A are a basis of a subspace this is the restriction of f to it,
// written in basis coordinates.
inline HomogeneousForm compose_linear(const HomogeneousForm& f, const RMatrix& a) {
  if (a.rows() != f.dimension()) {
    throw DimensionError("compose_linear: matrix has " + std::to_string(a.rows()) +
                         " rows, form has " + std::to_string(f.dimension()) + " variables");
  }
  const std::size_t k = a.cols();
  if (k == 0) throw DimensionError("compose_linear: target dimension must be positive");
  std::vector<HomogeneousForm> substitutes;
  for (std::size_t i = 0; i < a.rows(); ++i) substitutes.push_back(HomogeneousForm::linear(a.row(i)));

  // powers[i][e] = substitutes[i]^e, built lazily.
  std::vector<std::vector<HomogeneousForm>> powers(a.rows());
  auto power_of = [&](std::size_t i, unsigned e) -> const HomogeneousForm& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(HomogeneousForm::constant(k, 1));
    while (cache.size() <= e) cache.push_back(cache.back() * substitutes[i]);
    return cache[e];
  };

  HomogeneousForm out(k, f.degree());
  for (const auto& [m, c] : f.terms()) {
    HomogeneousForm term = HomogeneousForm::constant(k, c);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) term = term * power_of(i, m[i]);
    out = out + term;
  }
  return out;
}

struct Division {
  HomogeneousForm quotient;
  HomogeneousForm remainder;
};

// Divides f by a nonzero linear form. The remainder is free of the first
// variable carrying a nonzero coefficient in `linear`; it is zero exactly when
// the linear form divides f.
inline Division divide_by_linear(const HomogeneousForm& f, const HomogeneousForm& linear) {
  if (linear.degree() != 1 || linear.is_zero()) {
    throw InterpolationError("divisor must be a nonzero linear form");
  }
  if (f.dimension() != linear.dimension()) throw DimensionError("division dimension mismatch");
  const std::size_t n = f.dimension();
  std::size_t j = n;
  Rational lead;
  for (std::size_t i = 0; i < n && j == n; ++i) {
    MultiIndex e(n, 0);
    e[i] = 1;
    if (auto c = linear.coefficient(e); c != 0) {
      j = i;
      lead = c;
    }
  }
  if (f.degree() == 0) {
    return {HomogeneousForm(n, 0), f};
  }
  HomogeneousForm quotient(n, f.degree() - 1);
  HomogeneousForm rest = f;
  for (;;) {
    const MultiIndex* top = nullptr;
    Rational top_c;
    for (const auto& [m, c] : rest.terms())
      if (m[j] > 0 && (!top || m[j] > (*top)[j])) {
        top = &m;
        top_c = c;
      }
    if (!top) break;
    MultiIndex qm = *top;
    qm[j] -= 1;
    const HomogeneousForm step = HomogeneousForm::monomial(qm, top_c / lead);
    quotient = quotient + step;
    rest = rest - step * linear;
  }
  return {quotient, rest};
}

// Graded sequence T_0..T_R, deg T_r = r, representing sum_r T_r / r!.
class TaylorTower {
 public:
  TaylorTower(std::size_t n, std::vector<HomogeneousForm> forms)
      : n_(n), forms_(std::move(forms)) {
    if (forms_.empty()) throw DimensionError("a tower needs at least T_0");
    for (std::size_t r = 0; r < forms_.size(); ++r) {
      if (forms_[r].dimension() != n_) throw DimensionError("tower entry of wrong dimension");
      if (!forms_[r].is_zero() && forms_[r].degree() != r) {
        throw DimensionError("tower entry " + std::to_string(r) + " has degree " +
                             std::to_string(forms_[r].degree()));
      }
      if (forms_[r].is_zero()) forms_[r] = HomogeneousForm(n_, static_cast<unsigned>(r));
    }
  }

  std::size_t dimension() const noexcept { return n_; }
  unsigned order() const noexcept { return static_cast<unsigned>(forms_.size() - 1); }
  const HomogeneousForm& operator[](std::size_t r) const { return forms_.at(r); }
  const std::vector<HomogeneousForm>& forms() const noexcept { return forms_; }

  friend bool operator==(const TaylorTower&, const TaylorTower&) = default;

 private:
  std::size_t n_;
  std::vector<HomogeneousForm> forms_;
};

inline Rational tower_evaluate(const TaylorTower& t, std::span<const Rational> p, unsigned truncation) {
  if (truncation > t.order()) {
    throw DimensionError("truncation " + std::to_string(truncation) + " exceeds tower order " +
                         std::to_string(t.order()));
  }
  if (p.size() != t.dimension()) throw DimensionError("point length differs from tower dimension");
  Rational sum = 0;
  for (unsigned r = 0; r <= truncation; ++r) sum += evaluate_form(t[r], p) / factorial(r);
  return sum;
}

inline Rational tower_evaluate(const TaylorTower& t, std::span<const Rational> p) {
  return tower_evaluate(t, p, t.order());
}

inline double tower_evaluate(const TaylorTower& t, std::span<const double> p) {
  if (p.size() != t.dimension()) throw DimensionError("point length differs from tower dimension");
  double sum = 0;
  double fact = 1;
  for (unsigned r = 0; r <= t.order(); ++r) {
    if (r > 0) fact *= r;
    sum += evaluate_form(t[r], p) / fact;
  }
  return sum;
}

}  // namespace analytica
