#pragma once

// Radial Taylor data of an oracle, the tower T = sum_r T_r / r! assembled
// from it on a cone, and per-line root-test convergence diagnostics.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/forms.hpp"
#include "analytica/geometry.hpp"
#include "analytica/interpolation.hpp"
#include "analytica/oracle.hpp"
#include "analytica/rational.hpp"
#include "analytica/series.hpp"

namespace analytica {

// Taylor coefficients at 0 of a univariate oracle (n = 1), exactly.
inline RVec taylor_1d_series(const Expression& e, unsigned order) {
  if (e.dimension() != 1) throw DimensionError("taylor_1d_series expects a univariate expression");
  const RVec zero{0}, one{1};
  return taylor_1d_series(restrict_to_line(e.root(), zero, one), order);
}

enum class JetMode { kExact, kFitted };

// tau_r = d^r/dt^r f(origin + t p) at t = 0, r = 0..R.
struct RadialJet {
  RVec direction;
  JetMode mode = JetMode::kExact;
  RVec exact;                  // exact mode only
  std::vector<double> values;  // both modes
  // Fitted mode: bound on |error of tau_r| * window^r / r!, i.e. on the
  // error of the window-scaled coefficients.
  double error_bound = 0;
};

inline RadialJet radial_jet(const FunctionOracle& f, std::span<const Rational> p, unsigned order,
                            std::span<const Rational> origin = {}) {
  const std::size_t n = f.dimension();
  if (p.size() != n) throw DimensionError("jet direction length differs from oracle dimension");
  if (is_zero(p)) throw GeometryError("jet direction must be nonzero");
  const RVec base = origin.empty() ? zeros(n) : RVec(origin.begin(), origin.end());
  if (base.size() != n) throw DimensionError("jet origin length differs from oracle dimension");

  const RVec s = taylor_1d_series(restrict_to_line(f.expression().root(), base, p), order);
  if (f.guard() && f.guard()->point == base && f.guard()->value != s[0]) {
    throw NotAnalyticError("guard value " + f.guard()->value.get_str() + " at " + to_string(base) +
                           " differs from the limit " + s[0].get_str() + " along " + to_string(p));
  }
  RadialJet jet{RVec(p.begin(), p.end()), JetMode::kExact, {}, {}, 0};
  for (unsigned r = 0; r <= order; ++r) {
    jet.exact.push_back(s[r] * factorial(r));
    jet.values.push_back(to_double(jet.exact.back()));
  }
  return jet;
}

struct FitOptions {
  unsigned guard_terms = 4;
  double window = 0.1;
  double residual_tolerance = 1e-6;  // relative fit residual
};

// Least-squares fit of degree R + G on 2(R+G)+1 Chebyshev nodes of
// [-window, window] to t -> line(t).
inline RadialJet radial_jet_fitted(const std::function<double(double)>& line, std::span<const Rational> p,
                                   unsigned order, const FitOptions& options = {}) {
  const unsigned degree = order + options.guard_terms;
  const unsigned nodes = 2 * degree + 1;
  const double eps = options.window;
  Eigen::MatrixXd a(nodes, degree + 1);
  Eigen::VectorXd b(nodes);
  for (unsigned k = 0; k < nodes; ++k) {
    double s = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * nodes));
    if (std::abs(s) < 1e-12) s = 0;
    double value = 0;
    for (int attempt = 0;; ++attempt) {
      try {
        value = line(eps * s);
        break;
      } catch (const PoleError&) {
        // Node avoidance: nudge the node off an isolated bad point.
        if (attempt == 3) throw;
        s = s == 0 ? 1e-3 : s * (1 + 1e-3);
      }
    }
    if (!std::isfinite(value)) {
      throw NotAnalyticError("non-finite sample at t = " + std::to_string(eps * s));
    }
    double m = 1;
    for (unsigned j = 0; j <= degree; ++j, m *= s) a(k, j) = m;
    b(k) = value;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  const double scale = std::max(b.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double residual = (a * c - b).cwiseAbs().maxCoeff() / scale;
  if (!(residual <= options.residual_tolerance)) {
    throw NotAnalyticError("restriction not analytic at this scale (relative fit residual " +
                           std::to_string(residual) + ")");
  }
  double guard = 0, largest = 0;
  for (unsigned j = 0; j <= degree; ++j) {
    largest = std::max(largest, std::abs(c(j)));
    if (j > order) guard = std::max(guard, std::abs(c(j)));
  }
  // Tail terms alias into the kept ones with a gain no larger than 2^degree.
  const double amplification = std::ldexp(1.0, static_cast<int>(degree));
  RadialJet jet{RVec(p.begin(), p.end()), JetMode::kFitted, {}, {}, 0};
  jet.error_bound = amplification * (guard + 1e-13 * largest);
  double fact = 1;
  for (unsigned r = 0; r <= order; ++r) {
    if (r > 0) fact *= r;
    jet.values.push_back(fact * c(r) / std::pow(eps, r));
  }
  return jet;
}

inline RadialJet radial_jet_fitted(const FunctionOracle& f, std::span<const Rational> p, unsigned order,
                                   const FitOptions& options = {}, std::span<const Rational> origin = {}) {
  const std::size_t n = f.dimension();
  const std::vector<double> dir = to_doubles(p);
  const std::vector<double> base = origin.empty() ? std::vector<double>(n, 0.0) : to_doubles(origin);
  auto line = [&](double t) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = base[i] + t * dir[i];
    return f.evaluate_float(x);
  };
  return radial_jet_fitted(line, p, order, options);
}

// Root-test estimate 1 / max_r |T_r(p)/r!|^(1/r) over the top half of the
// degrees (r >= ceil(R/2), r >= 1). Infinite when those terms all vanish;
// nullopt when R < 4.
inline std::optional<double> line_convergence_radius(const TaylorTower& t, std::span<const Rational> p) {
  const unsigned order = t.order();
  if (order < 4) return std::nullopt;
  double root = 0;
  for (unsigned r = std::max(1u, (order + 1) / 2); r <= order; ++r) {
    const Rational term = abs(evaluate_form(t[r], p) / factorial(r));
    if (term == 0) continue;
    // log via mpz sizes would avoid overflow; the doubles here stay modest.
    root = std::max(root, std::pow(term.get_d(), 1.0 / r));
  }
  return root == 0 ? std::numeric_limits<double>::infinity() : 1.0 / root;
}

class TowerError : public Error {
 public:
  TowerError(const std::string& what, std::optional<RVec> direction, std::optional<unsigned> degree)
      : Error(what), direction_(std::move(direction)), degree_(degree) {}
  const std::optional<RVec>& direction() const noexcept { return direction_; }
  const std::optional<unsigned>& degree() const noexcept { return degree_; }

 private:
  std::optional<RVec> direction_;
  std::optional<unsigned> degree_;
};

struct LineRadius {
  RVec direction;
  std::optional<double> radius;  // nullopt: refused (order < 4)
};

struct TowerBuild {
  TaylorTower tower;
  std::vector<double> per_degree_residual;
  std::vector<LineRadius> line_radii;
};

// Diagnostic directions of a tower built on a cone: the axis basis vectors
// and their sum.
inline std::vector<RVec> diagnostic_directions(const Cone& cone) {
  const auto& a = cone.axis().first();
  const auto& b = cone.axis().second();
  return {a, b, a + b};
}

// T_r is the degree-r form agreeing with p -> tau_r(p) on the subcone C_V,
// r = 0..R. Jets are exact; each degree is recovered by the cone solver with
// the same seed, so sample points (and their jets) are shared across degrees.
inline TowerBuild build_tower(const FunctionOracle& f, const Cone& cone, unsigned order, std::uint64_t seed,
                              std::span<const Rational> origin = {}) {
  if (cone.dimension() != f.dimension()) throw DimensionError("cone and oracle dimensions differ");
  std::map<RVec, RVec> jets;
  auto jet_at = [&](const RVec& p) -> const RVec& {
    auto it = jets.find(p);
    if (it != jets.end()) return it->second;
    try {
      return jets.emplace(p, radial_jet(f, p, order, origin).exact).first->second;
    } catch (const Error& e) {
      throw TowerError("radial jet along " + to_string(p) + " failed: " + e.what(), p, std::nullopt);
    }
  };
  std::vector<HomogeneousForm> forms;
  std::vector<double> residuals;
  for (unsigned r = 0; r <= order; ++r) {
    auto sigma = [&](const RVec& p) { return jet_at(p)[r]; };
    try {
      ConeReconstruction rec = reconstruct_form_from_cone(r, sigma, cone, seed);
      residuals.push_back(rec.held_out_residual.get_d());
      forms.push_back(std::move(rec.form));
    } catch (const TowerError&) {
      throw;
    } catch (const InterpolationError& e) {
      throw TowerError("degree " + std::to_string(r) + ": " + e.what(), std::nullopt, r);
    }
  }
  TowerBuild out{TaylorTower(f.dimension(), std::move(forms)), std::move(residuals), {}};
  for (const auto& dir : diagnostic_directions(cone)) {
    out.line_radii.push_back({dir, line_convergence_radius(out.tower, dir)});
  }
  return out;
}

}  // namespace analytica
