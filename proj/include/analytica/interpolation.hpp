#pragma once

// Exact reconstruction of homogeneous forms from restriction data:
//  * univariate Lagrange interpolation,
//  * binary forms from their values on d+1 lines,
//  * gluing a form on R^n from compatible restrictions to d+1 hyperplanes in
//    general position,
//  * recovering a form from its values on a cone around a 2-plane.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/forms.hpp"
#include "analytica/geometry.hpp"
#include "analytica/random.hpp"
#include "analytica/rational.hpp"

namespace analytica {

// Ascending coefficients of the unique polynomial of degree <= d through the
// d+1 samples (node, value).
inline RVec lagrange_1d(const std::vector<std::pair<Rational, Rational>>& samples, unsigned d) {
  if (samples.size() != d + 1) {
    throw InterpolationError("lagrange_1d: expected " + std::to_string(d + 1) + " samples, got " +
                             std::to_string(samples.size()));
  }
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (samples[i].first == samples[j].first) {
        throw InterpolationError("lagrange_1d: duplicate node " + samples[i].first.get_str());
      }
  // Newton divided differences, then expansion of the Newton form.
  RVec coef;
  for (const auto& s : samples) coef.push_back(s.second);
  for (std::size_t j = 1; j <= d; ++j)
    for (std::size_t i = d; i >= j; --i)
      coef[i] = (coef[i] - coef[i - 1]) / (samples[i].first - samples[i - j].first);
  RVec poly{coef[d]};
  for (std::size_t k = d; k-- > 0;) {
    // poly <- poly * (t - x_k) + coef[k]
    RVec next(poly.size() + 1, Rational(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * samples[k].first;
    }
    next[0] += coef[k];
    poly = std::move(next);
  }
  poly.resize(d + 1);
  return poly;
}

struct LineValue {
  RVec direction;  // length 2
  Rational value;  // the form at `direction`; its restriction to t*direction is value * t^d
};

// The unique binary form of degree d with the given values on at least d+1
// pairwise non-proportional lines. Lines beyond the first d+1 must agree.
inline HomogeneousForm binary_form_from_lines(unsigned d, const std::vector<LineValue>& lines) {
  if (lines.size() < d + 1) {
    throw InterpolationError("binary_form_from_lines: need " + std::to_string(d + 1) + " lines");
  }
  for (const auto& l : lines) {
    if (l.direction.size() != 2) throw DimensionError("line directions must lie in R^2");
    if (is_zero(l.direction)) throw InterpolationError("zero line direction");
  }
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& a = lines[i].direction;
      const auto& b = lines[j].direction;
      if (a[0] * b[1] - a[1] * b[0] == 0) {
        throw InterpolationError("binary_form_from_lines: lines " + std::to_string(i) + " and " +
                                 std::to_string(j) + " are proportional");
      }
    }
  const auto basis = monomial_basis(2, d);
  RMatrix a(d + 1, d + 1);
  RVec b(d + 1);
  for (std::size_t i = 0; i <= d; ++i) {
    for (std::size_t k = 0; k < basis.size(); ++k)
      a(i, k) = power(lines[i].direction[0], basis[k][0]) * power(lines[i].direction[1], basis[k][1]);
    b[i] = lines[i].value;
  }
  const auto coefficients = solve(a, b);
  if (!coefficients) throw InterpolationError("binary_form_from_lines: singular system (internal error)");
  HomogeneousForm f = HomogeneousForm::from_dense(2, d, *coefficients);
  for (std::size_t i = d + 1; i < lines.size(); ++i)
    if (evaluate_form(f, lines[i].direction) != lines[i].value) {
      throw InterpolationError("binary_form_from_lines: line " + std::to_string(i) +
                               " is inconsistent with the first " + std::to_string(d + 1));
    }
  return f;
}

// A form given on a hyperplane H in the coordinates of a chart (an n x (n-1)
// matrix whose columns span H).
struct HyperplaneRestriction {
  Hyperplane hyperplane;
  RMatrix chart;
  HomogeneousForm form;

  void validate() const {
    const std::size_t n = hyperplane.dimension();
    if (chart.rows() != n || chart.cols() + 1 != n) {
      throw DimensionError("chart must be " + std::to_string(n) + " x " + std::to_string(n - 1));
    }
    for (const auto& col : chart.columns())
      if (!hyperplane.contains(col)) throw GeometryError("chart column outside its hyperplane");
    if (rank(chart) != n - 1) throw GeometryError("chart columns must span the hyperplane");
    if (form.dimension() != n - 1) throw DimensionError("restricted form must have n-1 variables");
  }
};

// Restriction of g to H in H's canonical chart.
inline HyperplaneRestriction restrict_to_hyperplane(const HomogeneousForm& g, const Hyperplane& h) {
  RMatrix chart = h.chart();
  HomogeneousForm f = compose_linear(g, chart);
  return {h, std::move(chart), std::move(f)};
}

struct CompatibilityReport {
  bool compatible = true;
  std::vector<std::pair<std::size_t, std::size_t>> failing_pairs;
};

namespace detail {

// Coordinates of the columns of k in the chart, exact; k must lie in its span.
inline RMatrix chart_coordinates(const RMatrix& chart, const RMatrix& k) {
  const RMatrix ct = chart.transpose();
  const auto gram_inv = inverse(ct * chart);
  if (!gram_inv) throw GeometryError("degenerate chart");
  RMatrix coords = *gram_inv * (ct * k);
  if (!(chart * coords == k)) throw GeometryError("subspace not contained in chart span");
  return coords;
}

}  // namespace detail

// Pairwise agreement of g_i and g_j on H_i and H_j's intersection, compared
// exactly through a shared basis of the intersection.
inline CompatibilityReport check_compatibility(const std::vector<HyperplaneRestriction>& rs) {
  CompatibilityReport report;
  if (rs.empty()) return report;
  const std::size_t n = rs.front().hyperplane.dimension();
  const unsigned d = rs.front().form.degree();
  for (const auto& r : rs) {
    r.validate();
    if (r.hyperplane.dimension() != n) throw DimensionError("restrictions live in different dimensions");
    if (!r.form.is_zero() && r.form.degree() != d) throw DimensionError("restrictions have different degrees");
  }
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      const RMatrix k = kernel(RMatrix::from_rows({rs[i].hyperplane.normal(), rs[j].hyperplane.normal()}));
      bool ok;
      if (k.cols() == 0) {
        // The intersection is the origin: only constants can disagree there.
        ok = d != 0 || rs[i].form == rs[j].form;
      } else {
        ok = compose_linear(rs[i].form, detail::chart_coordinates(rs[i].chart, k)) ==
             compose_linear(rs[j].form, detail::chart_coordinates(rs[j].chart, k));
      }
      if (!ok) {
        report.compatible = false;
        report.failing_pairs.emplace_back(i, j);
      }
    }
  return report;
}

namespace detail {

// Extension of g_0 from H_0 to R^n that is constant along e_j, j the first
// coordinate where H_0's normal is nonzero.
inline HomogeneousForm extend_from_hyperplane(const HyperplaneRestriction& r) {
  const std::size_t n = r.hyperplane.dimension();
  const auto& normal = r.hyperplane.normal();
  const std::size_t j = static_cast<std::size_t>(
      std::find_if(normal.begin(), normal.end(), [](const Rational& q) { return q != 0; }) - normal.begin());
  std::vector<RVec> columns = r.chart.columns();
  columns.push_back(unit_vector(n, j));
  const auto inv = inverse(RMatrix::from_columns(columns));
  if (!inv) throw GeometryError("chart plus complement is singular");
  RMatrix lift(n - 1, n);
  for (std::size_t a = 0; a + 1 < n; ++a)
    for (std::size_t b = 0; b < n; ++b) lift(a, b) = (*inv)(a, b);
  return compose_linear(r.form, lift);
}

inline HomogeneousForm glue(unsigned d, const std::vector<HyperplaneRestriction>& rs) {
  const std::size_t n = rs.front().hyperplane.dimension();
  if (d == 0) {
    return HomogeneousForm::constant(n, rs.front().form.coefficient(MultiIndex(n - 1, 0)));
  }
  const HyperplaneRestriction& first = rs.front();
  const HomogeneousForm g0 = extend_from_hyperplane(first);
  const HomogeneousForm lambda0 = HomogeneousForm::linear(first.hyperplane.normal());
  // On H_i the difference g_i - g0|H_i vanishes on H_i and H_0's intersection,
  // so it is divisible by lambda0|H_i. The quotients form a compatible
  // degree-(d-1) family on H_1..H_d.
  std::vector<HyperplaneRestriction> quotients;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const HomogeneousForm diff = rs[i].form - compose_linear(g0, rs[i].chart);
    const HomogeneousForm divisor = compose_linear(lambda0, rs[i].chart);
    Division q = divide_by_linear(diff, divisor);
    if (!q.remainder.is_zero()) {
      throw InterpolationError("glue_hyperplanes: restriction " + std::to_string(i) +
                               " is not divisible at degree " + std::to_string(d) +
                               " (inconsistent input)");
    }
    quotients.push_back({rs[i].hyperplane, rs[i].chart, std::move(q.quotient)});
  }
  const HomogeneousForm h = glue(d - 1, quotients);
  return g0 + lambda0 * h;
}

}  // namespace detail

// The unique degree-d form g on R^n with g restricted to H_i equal to g_i,
// from exactly d+1 compatible restrictions in general position.
inline HomogeneousForm glue_hyperplanes(unsigned d, const std::vector<HyperplaneRestriction>& rs) {
  if (rs.size() != d + 1) {
    throw InterpolationError("glue_hyperplanes: expected " + std::to_string(d + 1) + " restrictions, got " +
                             std::to_string(rs.size()));
  }
  const std::size_t n = rs.front().hyperplane.dimension();
  if (n < 2) throw DimensionError("glue_hyperplanes needs n >= 2");
  for (const auto& r : rs) {
    r.validate();
    if (r.hyperplane.dimension() != n) throw DimensionError("restrictions live in different dimensions");
    if (!r.form.is_zero() && r.form.degree() != d) {
      throw DimensionError("restriction of degree " + std::to_string(r.form.degree()) + ", expected " +
                           std::to_string(d));
    }
  }
  std::vector<Hyperplane> hs;
  for (const auto& r : rs) hs.push_back(r.hyperplane);
  if (!general_position(hs, n)) throw InterpolationError("glue_hyperplanes: hyperplanes not in general position");
  const auto compat = check_compatibility(rs);
  if (!compat.compatible) {
    std::string pairs;
    for (auto [i, j] : compat.failing_pairs) pairs += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    throw InterpolationError("glue_hyperplanes: incompatible restrictions on pairs" + pairs);
  }
  return detail::glue(d, rs);
}

// Draws 2-planes of the subcone C_V (planes inside the cone that contain a
// line of the axis V) and points on them. All coordinates are rationals with
// small numerators and power-of-two denominators.
class ConeSampler {
 public:
  ConeSampler(Cone cone, std::uint64_t seed) : cone_(std::move(cone)), rng_(seed) {}

  VectorPlane2 next_plane() {
    const RVec& b1 = cone_.axis().first();
    const RVec& b2 = cone_.axis().second();
    std::int64_t a = 0, b = 0, a2 = 0, b2c = 0;
    while (a == 0 && b == 0) {
      a = rng_.uniform_int(-3, 3);
      b = rng_.uniform_int(-3, 3);
    }
    while (a * b2c - b * a2 == 0) {
      a2 = rng_.uniform_int(-3, 3);
      b2c = rng_.uniform_int(-3, 3);
    }
    const RVec line = Rational(a) * b1 + Rational(b) * b2;
    const RVec inside = Rational(a2) * b1 + Rational(b2c) * b2;
    const RVec tilt = rng_.small_vector(cone_.dimension(), 3);
    Rational delta = 1;
    for (int halvings = 0; halvings < 48; ++halvings, delta /= 2) {
      const RVec u = inside + delta * tilt;
      if (rank_of_columns({line, u}) != 2) continue;
      VectorPlane2 candidate(line, u);
      if (plane_in_subcone(cone_, cone_.axis(), candidate)) return candidate;
    }
    return VectorPlane2(line, inside);
  }

  RVec next_point() {
    const VectorPlane2 plane = next_plane();
    std::int64_t s = 0, t = 0;
    while (s == 0 && t == 0) {
      s = rng_.uniform_int(-4, 4);
      t = rng_.uniform_int(-4, 4);
    }
    return Rational(s) * plane.first() + Rational(t) * plane.second();
  }

  SeededRng& rng() noexcept { return rng_; }
  const Cone& cone() const noexcept { return cone_; }

 private:
  Cone cone_;
  SeededRng rng_;
};

class NotPolynomialError : public InterpolationError {
 public:
  NotPolynomialError(const std::string& what, std::optional<double> residual)
      : InterpolationError(what), residual_(residual) {}
  // Largest held-out discrepancy, when it could be measured.
  std::optional<double> residual() const noexcept { return residual_; }

 private:
  std::optional<double> residual_;
};

struct ConeReconstruction {
  HomogeneousForm form;
  std::size_t fit_samples = 0;
  std::size_t held_out_samples = 0;
  unsigned attempts = 0;
  Rational held_out_residual = 0;  // always 0 on success in exact mode
};

inline constexpr unsigned kMaxResamples = 8;

// Recovers the degree-d form that agrees with sigma on the subcone C_V of
// the cone. sigma maps an RVec to a Rational. 2N fit samples (N the number
// of monomials) and max(N, 8) fresh held-out samples must all match exactly.
template <class Sigma>
ConeReconstruction reconstruct_form_from_cone(unsigned d, Sigma&& sigma, const Cone& cone, std::uint64_t seed) {
  // A gmp expression template returned by value would dangle.
  static_assert(std::is_same_v<std::remove_cvref_t<std::invoke_result_t<Sigma&, const RVec&>>, Rational>,
                "sigma must return a Rational");
  const std::size_t n = cone.dimension();
  const auto basis = monomial_basis(n, d);
  const std::size_t unknowns = basis.size();
  ConeSampler sampler(cone, seed);
  for (unsigned attempt = 0; attempt <= kMaxResamples; ++attempt) {
    RMatrix a(2 * unknowns, unknowns);
    RVec b(2 * unknowns);
    for (std::size_t i = 0; i < 2 * unknowns; ++i) {
      const RVec p = sampler.next_point();
      for (std::size_t k = 0; k < unknowns; ++k) {
        Rational m = 1;
        for (std::size_t v = 0; v < n; ++v)
          if (basis[k][v]) m *= power(p[v], basis[k][v]);
        a(i, k) = m;
      }
      b[i] = sigma(p);
    }
    const LeastExact fit = solve_overdetermined(a, b);
    if (!fit.consistent) {
      throw NotPolynomialError("sigma is not a degree-" + std::to_string(d) +
                                   " form on the cone: fit samples are inconsistent",
                               std::nullopt);
    }
    if (!fit.solution) continue;
    HomogeneousForm form = HomogeneousForm::from_dense(n, d, *fit.solution);
    const std::size_t held = std::max<std::size_t>(unknowns, 8);
    Rational worst = 0;
    for (std::size_t i = 0; i < held; ++i) {
      const RVec p = sampler.next_point();
      const Rational r = abs(evaluate_form(form, p) - sigma(p));
      worst = std::max(worst, r);
    }
    if (worst != 0) {
      throw NotPolynomialError("sigma is not a degree-" + std::to_string(d) +
                                   " form on the cone: held-out residual " + worst.get_str(),
                               worst.get_d());
    }
    return {std::move(form), 2 * unknowns, held, attempt + 1, 0};
  }
  throw InterpolationError("reconstruct_form_from_cone: rank-deficient sampling after " +
                           std::to_string(kMaxResamples) + " retries");
}

// Float-mode counterpart for oracles that only produce binary64 values.
struct FittedForm {
  std::size_t dimension = 0;
  unsigned degree = 0;
  std::vector<MultiIndex> basis;
  std::vector<double> coefficients;
  double held_out_residual = 0;  // relative

  double evaluate(std::span<const double> p) const {
    double sum = 0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      double m = coefficients[k];
      for (std::size_t v = 0; v < dimension; ++v)
        for (unsigned e = 0; e < basis[k][v]; ++e) m *= p[v];
      sum += m;
    }
    return sum;
  }
};

template <class Sigma>
FittedForm reconstruct_form_from_cone_fitted(unsigned d, Sigma&& sigma, const Cone& cone, std::uint64_t seed,
                                             double relative_tolerance = 1e-9) {
  const std::size_t n = cone.dimension();
  FittedForm out{n, d, monomial_basis(n, d), {}, 0};
  const std::size_t unknowns = out.basis.size();
  ConeSampler sampler(cone, seed);
  auto monomials = [&](const std::vector<double>& p, Eigen::MatrixXd& a, Eigen::Index row) {
    for (std::size_t k = 0; k < unknowns; ++k) {
      double m = 1;
      for (std::size_t v = 0; v < n; ++v)
        for (unsigned e = 0; e < out.basis[k][v]; ++e) m *= p[v];
      a(row, static_cast<Eigen::Index>(k)) = m;
    }
  };
  for (unsigned attempt = 0; attempt <= kMaxResamples; ++attempt) {
    const auto rows = static_cast<Eigen::Index>(2 * unknowns);
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(unknowns));
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto p = to_doubles(sampler.next_point());
      monomials(p, a, i);
      b(i) = sigma(p);
    }
    const auto qr = a.colPivHouseholderQr();
    if (qr.rank() < static_cast<Eigen::Index>(unknowns)) continue;
    const Eigen::VectorXd x = qr.solve(b);
    out.coefficients.assign(x.data(), x.data() + x.size());
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < std::max<std::size_t>(unknowns, 8); ++i) {
      const auto p = to_doubles(sampler.next_point());
      const double v = sigma(p);
      worst = std::max(worst, std::abs(out.evaluate(p) - v));
      scale = std::max(scale, std::abs(v));
    }
    out.held_out_residual = scale > 0 ? worst / scale : worst;
    if (!(out.held_out_residual <= relative_tolerance)) {
      throw NotPolynomialError("sigma is not a degree-" + std::to_string(d) +
                                   " form on the cone: relative held-out residual " +
                                   std::to_string(out.held_out_residual),
                               out.held_out_residual);
    }
    return out;
  }
  throw InterpolationError("reconstruct_form_from_cone_fitted: rank-deficient sampling after " +
                           std::to_string(kMaxResamples) + " retries");
}

}  // namespace analytica
