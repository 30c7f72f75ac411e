#pragma once

// Exact rational scalars, vectors and small dense matrices.
//
// Everything in the reconstruction kernels runs over GMP rationals; the
// helpers here are the only linear algebra the library needs (ranks,
// kernels, square solves), all by fraction-exact Gaussian elimination.

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "analytica/errors.hpp"

namespace analytica {

using Rational = mpq_class;

// num/den in lowest terms. mpq_class(num, den) skips this, and gmp requires it.
inline Rational ratio(long num, long den) {
  if (den == 0) throw Error("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}
using RVec = std::vector<Rational>;

// Parses "7", "-3/4", "0.125", "-2.5". Always canonicalizes.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw Error("empty rational literal");
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  std::string body = s.substr(pos);
  auto all_digits = [](std::string_view v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) {
      return std::isdigit(c);
    });
  };
  Rational out;
  if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string whole = body.substr(0, dot);
    std::string frac = body.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || !all_digits(frac)) {
      throw Error("malformed decimal literal '" + s + "'");
    }
    mpz_class num(whole + frac, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    out = Rational(num, den);
  } else if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error("malformed rational literal '" + s + "'");
    }
    mpz_class d(den, 10);
    if (d == 0) throw Error("zero denominator in '" + s + "'");
    out = Rational(mpz_class(num, 10), d);
  } else {
    if (!all_digits(body)) throw Error("malformed integer literal '" + s + "'");
    out = Rational(mpz_class(body, 10));
  }
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string to_string(std::span<const Rational> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].get_str();
  }
  return out + ")";
}

inline RVec parse_point(std::string_view text) {
  RVec out;
  std::string s(text);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw Error("empty point literal");
  return out;
}

// Round to nearest, ties to even. mpq_get_d alone truncates.
inline double to_double(const Rational& q) {
  const double d = q.get_d();
  if (!std::isfinite(d)) return d;
  const Rational here(d);
  if (here == q) return d;
  const double away = std::nextafter(d, q > 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(away)) return d;
  const Rational gap_here = abs(q - here), gap_away = abs(Rational(away) - q);
  if (gap_away != gap_here) return gap_away < gap_here ? away : d;
  return (std::bit_cast<std::uint64_t>(d) & 1u) ? away : d;
}

inline std::vector<double> to_doubles(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(to_double(q));
  return out;
}

// Exact conversion; every finite double is a dyadic rational.
inline RVec from_doubles(std::span<const double> v) {
  RVec out;
  out.reserve(v.size());
  for (double x : v) out.emplace_back(x);
  return out;
}

inline RVec zeros(std::size_t n) { return RVec(n, Rational(0)); }

inline RVec unit_vector(std::size_t n, std::size_t i) {
  RVec e = zeros(n);
  e.at(i) = 1;
  return e;
}

inline void require_same_size(std::span<const Rational> a,
                              std::span<const Rational> b) {
  if (a.size() != b.size()) {
    throw DimensionError("vector length mismatch: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  }
}

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  require_same_size(a, b);
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational norm2(std::span<const Rational> a) { return dot(a, a); }

inline bool is_zero(std::span<const Rational> a) {
  return std::all_of(a.begin(), a.end(), [](const Rational& q) { return q == 0; });
}

inline RVec operator+(const RVec& a, const RVec& b) {
  require_same_size(a, b);
  RVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline RVec operator-(const RVec& a, const RVec& b) {
  require_same_size(a, b);
  RVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline RVec operator*(const Rational& s, const RVec& a) {
  RVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

// Dense row-major rational matrix.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  static RMatrix identity(std::size_t n) {
    RMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static RMatrix from_columns(const std::vector<RVec>& columns) {
    if (columns.empty()) throw DimensionError("matrix needs at least one column");
    RMatrix m(columns.front().size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != m.rows_) throw DimensionError("ragged columns");
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  static RMatrix from_rows(const std::vector<RVec>& rows) {
    if (rows.empty()) throw DimensionError("matrix needs at least one row");
    RMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw DimensionError("ragged rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  RVec column(std::size_t j) const {
    RVec c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  RVec row(std::size_t i) const {
    return RVec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  std::vector<RVec> columns() const {
    std::vector<RVec> out;
    for (std::size_t j = 0; j < cols_; ++j) out.push_back(column(j));
    return out;
  }

  RMatrix transpose() const {
    RMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const RMatrix&, const RMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline RMatrix operator*(const RMatrix& a, const RMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
  RMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

inline RVec operator*(const RMatrix& a, std::span<const Rational> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector shape mismatch");
  RVec y(a.rows(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline RVec operator*(const RMatrix& a, const RVec& x) {
  return a * std::span<const Rational>(x);
}

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(RMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    const Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RMatrix m) { return row_reduce(m).size(); }

inline std::size_t rank_of_columns(const std::vector<RVec>& columns) {
  if (columns.empty()) return 0;
  return rank(RMatrix::from_columns(columns));
}

// Basis of {x : m x = 0}, one column per free variable, in the order the
// free columns appear. Deterministic.
inline RMatrix kernel(const RMatrix& m) {
  RMatrix r = m;
  const auto pivots = row_reduce(r);
  std::vector<std::size_t> free;
  for (std::size_t c = 0, k = 0; c < m.cols(); ++c) {
    if (k < pivots.size() && pivots[k] == c) {
      ++k;
    } else {
      free.push_back(c);
    }
  }
  RMatrix basis(m.cols(), free.size());
  for (std::size_t f = 0; f < free.size(); ++f) {
    basis(free[f], f) = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) basis(pivots[k], f) = -r(k, free[f]);
  }
  return basis;
}

// Unique solution of a square system, nullopt if singular.
inline std::optional<RVec> solve(const RMatrix& a, std::span<const Rational> b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw DimensionError("solve expects a square system");
  }
  const std::size_t n = a.rows();
  RMatrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
  RVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

inline std::optional<RMatrix> inverse(const RMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse expects a square matrix");
  const std::size_t n = a.rows();
  RMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
  RMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

// Result of an exactly consistent overdetermined solve.
struct LeastExact {
  std::optional<RVec> solution;  // set iff the system has full column rank and is consistent
  std::size_t rank = 0;
  bool consistent = false;
};

// Solves A x = b for a tall A. The system must be consistent for a solution;
// rank deficiency is reported rather than resolved.
inline LeastExact solve_overdetermined(const RMatrix& a, std::span<const Rational> b) {
  if (a.rows() != b.size()) throw DimensionError("right-hand side length mismatch");
  RMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  const auto pivots = row_reduce(aug);
  LeastExact out;
  out.consistent = pivots.empty() || pivots.back() != a.cols();
  out.rank = out.consistent ? pivots.size() : pivots.size() - 1;
  if (out.consistent && out.rank == a.cols()) {
    RVec x(a.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) x[i] = aug(i, a.cols());
    out.solution = std::move(x);
  }
  return out;
}

inline Rational factorial(unsigned r) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), r);
  return Rational(f);
}

inline Rational power(const Rational& base, unsigned k) {
  Rational out = 1;
  Rational b = base;
  while (k) {
    if (k & 1u) out *= b;
    k >>= 1u;
    if (k) b *= b;
  }
  return out;
}

}  // namespace analytica
