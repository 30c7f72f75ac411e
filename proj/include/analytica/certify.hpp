#pragma once

// Analyticity diagnostics: restriction checks on affine 2-planes, local
// certification near a plane through a Taylor tower, and sphere scans via
// inversion. Passing verdicts are numerical evidence only.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/forms.hpp"
#include "analytica/geometry.hpp"
#include "analytica/oracle.hpp"
#include "analytica/random.hpp"
#include "analytica/rational.hpp"
#include "analytica/taylor.hpp"

namespace analytica {

enum class Verdict { kPass, kFail, kPole };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kPole: return "pole";
  }
  return "?";
}

inline constexpr unsigned kGuardTerms = 4;
inline constexpr double kDefaultTolerance = 1e-9;

struct PlaneReport {
  AffinePlane2 plane;
  unsigned fit_degree = 0;
  double residual = 0;  // +inf on a pole
  Verdict verdict = Verdict::kPass;
  std::optional<std::vector<double>> witness;
  bool exact_path = false;
};

namespace detail {

// Orthonormal basis of the direction plane, in binary64.
inline std::array<std::vector<double>, 2> orthonormal_chart(const AffinePlane2& q) {
  std::vector<double> e1 = to_doubles(q.u()), e2 = to_doubles(q.v());
  auto norm = [](const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };
  const double n1 = norm(e1);
  for (double& v : e1) v /= n1;
  double proj = 0;
  for (std::size_t i = 0; i < e1.size(); ++i) proj += e1[i] * e2[i];
  for (std::size_t i = 0; i < e1.size(); ++i) e2[i] -= proj * e1[i];
  const double n2 = norm(e2);
  for (double& v : e2) v /= n2;
  return {e1, e2};
}

// Chebyshev nodes of the first kind on [-1, 1]; the middle node is exactly 0.
inline std::vector<double> chebyshev_nodes(unsigned m) {
  std::vector<double> s(m);
  for (unsigned k = 0; k < m; ++k) {
    s[k] = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * m));
    if (std::abs(s[k]) < 1e-12) s[k] = 0;
  }
  return s;
}

inline void chebyshev_values(double x, unsigned degree, std::vector<double>& out) {
  out.assign(degree + 1, 1.0);
  if (degree >= 1) out[1] = x;
  for (unsigned k = 2; k <= degree; ++k) out[k] = 2 * x * out[k - 1] - out[k - 2];
}

inline bool guard_matches_expression(const FunctionOracle& f) {
  try {
    return evaluate(f.expression().root(), std::span<const Rational>(f.guard()->point)) == f.guard()->value;
  } catch (const PoleError&) {
    return false;
  }
}

}  // namespace detail

// Samples f on base + window*(x e1 + y e2), (x, y) on an m x m Chebyshev grid
// with m = 2(R+G)+1, and fits sum c_ij T_i(x) T_j(y) over i + j <= R + G.
// residual = max |fit - f| / max |f| over the grid.
inline PlaneReport check_plane_analytic(const FunctionOracle& f, const AffinePlane2& q, const Rational& window,
                                        unsigned order, double tolerance = kDefaultTolerance) {
  if (q.dimension() != f.dimension()) throw DimensionError("plane and oracle dimensions differ");
  if (window <= 0) throw ConfigError("plane check window must be positive");
  if (order < 2) throw ConfigError("plane check degree must be at least 2");
  const unsigned degree = order + kGuardTerms;
  PlaneReport report{q, order, 0, Verdict::kPass, std::nullopt, false};
  const double eps = to_double(window);
  const auto [e1, e2] = detail::orthonormal_chart(q);
  const std::vector<double> base = to_doubles(q.base());
  const std::size_t n = f.dimension();

  auto guard_in_window = [&]() {
    if (!f.guard() || !q.contains(f.guard()->point)) return false;
    const std::vector<double> g = to_doubles(f.guard()->point);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a += (g[i] - base[i]) * e1[i];
      b += (g[i] - base[i]) * e2[i];
    }
    return std::abs(a) <= eps && std::abs(b) <= eps;
  };

  if (f.polynomial_core() && (!f.inversion_center() || !q.contains(*f.inversion_center()))) {
    report.exact_path = true;
    if (guard_in_window() && !detail::guard_matches_expression(f)) {
      report.verdict = Verdict::kFail;
      report.residual = std::numeric_limits<double>::infinity();
      report.witness = to_doubles(f.guard()->point);
    }
    return report;
  }

  const std::vector<double> nodes = detail::chebyshev_nodes(2 * degree + 1);
  std::vector<std::pair<unsigned, unsigned>> terms;
  for (unsigned total = 0; total <= degree; ++total)
    for (unsigned i = total + 1; i-- > 0;) terms.emplace_back(i, total - i);

  const auto rows = static_cast<Eigen::Index>(nodes.size() * nodes.size());
  Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(terms.size()));
  Eigen::VectorXd b(rows);
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(rows));
  std::vector<double> tx, ty;
  Eigen::Index row = 0;
  for (double x : nodes) {
    detail::chebyshev_values(x, degree, tx);
    for (double y : nodes) {
      detail::chebyshev_values(y, degree, ty);
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = base[i] + eps * (x * e1[i] + y * e2[i]);
      double value;
      try {
        value = f.evaluate_float(p);
      } catch (const PoleError&) {
        value = std::numeric_limits<double>::infinity();
      }
      if (!std::isfinite(value)) {
        report.verdict = Verdict::kPole;
        report.residual = std::numeric_limits<double>::infinity();
        report.witness = std::move(p);
        return report;
      }
      for (std::size_t k = 0; k < terms.size(); ++k)
        a(row, static_cast<Eigen::Index>(k)) = tx[terms[k].first] * ty[terms[k].second];
      b(row) = value;
      points.push_back(std::move(p));
      ++row;
    }
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd err = (a * c - b).cwiseAbs();
  Eigen::Index worst = 0;
  const double max_err = err.maxCoeff(&worst);
  const double scale = b.cwiseAbs().maxCoeff();
  report.residual = scale > 0 ? max_err / scale : max_err;
  if (!(report.residual <= tolerance)) {
    report.verdict = Verdict::kFail;
    report.witness = points[static_cast<std::size_t>(worst)];
  }
  return report;
}

struct CertifyOptions {
  Rational aperture{3, 10};
  Rational eta{1, 10};
  unsigned order = 6;
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 0;
  std::size_t agreement_samples = 32;
  std::size_t sweep_planes = 8;
};

struct CertifyReport {
  PlaneReport hypothesis;
  std::optional<TowerBuild> tower;  // absent when the hypothesis fails
  double agreement_residual = 0;
  std::vector<double> sweep_residuals;
  Rational eta;
  Verdict verdict = Verdict::kPass;
  std::optional<std::vector<double>> witness;
};

namespace detail {

// Rational approximation of |v| good to binary64 precision.
inline Rational approximate_norm(const RVec& v) {
  return Rational(std::sqrt(norm2(v).get_d()));
}

// Relative discrepancy max |f - T| / max |f| over the points, in the
// translated frame where the tower is centered at 0.
inline double tower_discrepancy(const FunctionOracle& g, const TaylorTower& t, const std::vector<RVec>& points,
                                std::optional<std::vector<double>>& witness, const RVec& shift) {
  Rational worst = 0, scale = 0;
  for (const auto& p : points) {
    const Rational v = g.evaluate_exact(p);
    const Rational d = abs(v - tower_evaluate(t, p));
    scale = std::max(scale, Rational(abs(v)));
    if (d > worst) {
      worst = d;
      witness = to_doubles(p + shift);
    }
  }
  if (worst == 0) return 0;
  return scale == 0 ? worst.get_d() : Rational(worst / scale).get_d();
}

}  // namespace detail

// Local certification near Q: check the plane hypothesis on Q, build the
// tower T at Q's base point on the cone of aperture theta around Q's
// direction plane, compare T with f on C(eta), then sweep the planes Q_p
// spanned by a fixed line l of Q (at distance eta/2 from the base) and
// perturbed points p with |p - l| <= eta/4.
inline CertifyReport certify_near_plane(const FunctionOracle& f, const AffinePlane2& q,
                                        const CertifyOptions& options) {
  if (options.eta <= 0) throw ConfigError("certify: eta must be positive, or the line cannot meet C(eta)");
  if (options.tolerance < 0) throw ConfigError("certify: tolerance must be non-negative");
  CertifyReport report{check_plane_analytic(f, q, options.eta, std::max(2u, options.order), options.tolerance),
                       std::nullopt,
                       0,
                       {},
                       options.eta,
                       Verdict::kPass,
                       std::nullopt};
  if (report.hypothesis.verdict != Verdict::kPass) {
    report.verdict = report.hypothesis.verdict;
    report.witness = report.hypothesis.witness;
    return report;
  }
  const std::size_t n = f.dimension();
  const RVec& shift = q.base();
  const FunctionOracle g = translate(f, shift);
  const Cone cone(q.direction(), options.aperture, options.eta);
  report.tower = build_tower(g, cone, options.order, options.seed);
  const TaylorTower& t = report.tower->tower;

  // Agreement on C(eta): cone samples rescaled to l1-norm eta/2.
  ConeSampler sampler(cone, options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<RVec> inside;
  for (std::size_t i = 0; i < options.agreement_samples; ++i) {
    RVec p = sampler.next_point();
    Rational l1 = 0;
    for (const auto& x : p) l1 += abs(x);
    inside.push_back((options.eta / (2 * l1)) * p);
  }
  std::optional<std::vector<double>> witness;
  report.agreement_residual = detail::tower_discrepancy(g, t, inside, witness, shift);
  bool ok = report.agreement_residual <= options.tolerance;
  if (!ok) report.witness = witness;

  // The line l = l0 + s u inside Q, with |l0| = eta/2 up to rounding.
  const RVec& u = q.u();
  const RVec& v = q.v();
  const RVec l0 = (options.eta / (2 * detail::approximate_norm(v))) * v;
  SeededRng rng(options.seed ^ 0xd1b54a32d192ed03ULL);
  const Rational quarter = options.eta / 4;
  for (std::size_t k = 0; k < options.sweep_planes; ++k) {
    RVec w;
    do {
      w = rng.small_vector(n, 6);
    } while (is_zero(w) || rank_of_columns({u, w}) < 2);
    Rational l1 = 0;
    for (const auto& x : w) l1 += abs(x);
    w = (quarter / l1) * w;  // |p - l0| <= eta/4
    const AffinePlane2 qp(l0, u, w);
    const PlaneReport check = check_plane_analytic(g, qp, quarter, std::max(2u, options.order), options.tolerance);
    double residual = check.residual;
    std::optional<std::vector<double>> local;
    if (check.verdict == Verdict::kPass) {
      // Points of Q_p within 3 eta / 4 of the origin.
      Rational ul1 = 0;
      for (const auto& x : u) ul1 += abs(x);
      std::vector<RVec> pts;
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
          const Rational s = ratio(i, 2) * options.eta / (8 * ul1);
          const Rational r = ratio(j, 2);
          pts.push_back(l0 + s * u + r * w);
        }
      residual = std::max(residual, detail::tower_discrepancy(g, t, pts, local, shift));
    } else {
      local = check.witness;
      if (local) {
        for (std::size_t i = 0; i < n; ++i) (*local)[i] += to_double(shift[i]);
      }
    }
    report.sweep_residuals.push_back(residual);
    if (!(residual <= options.tolerance)) {
      if (ok) report.witness = local;
      ok = false;
    }
  }
  report.verdict = ok ? Verdict::kPass : Verdict::kFail;
  return report;
}

struct ScanOptions {
  std::size_t count = 100;
  std::uint64_t seed = 0;
  unsigned order = 6;
  double tolerance = kDefaultTolerance;
  Rational window{1, 20};
  unsigned workers = 1;
};

struct SphereResult {
  std::optional<SphereThroughOrigin> sphere;  // absent when skipped
  std::string note;                           // reason for a skip
  RVec second_center;                         // p, the center of the second chart
  std::optional<PlaneReport> chart1, chart2;
  Verdict verdict = Verdict::kPass;
  int failing_chart = 0;  // 1 or 2 when the verdict is not pass
  double residual = 0;    // worst over the two charts
  std::optional<std::vector<double>> witness;  // on the sphere
};

struct ScanReport {
  ScanOptions options;
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::vector<SphereResult> results;
};

namespace detail {

struct SphereDraw {
  RVec c;
  RMatrix frame;
  RVec direction;  // in span(frame), picks the second-chart center
};

inline SphereDraw draw_sphere(SeededRng& rng, std::size_t n) {
  SphereDraw d;
  do {
    d.c = RVec(n);
    for (auto& x : d.c) x = ratio(rng.uniform_int(-9, 9), 10);
  } while (is_zero(d.c) || norm2(d.c) >= 1);
  if (n == 3) {
    d.frame = RMatrix::identity(3);
  } else {
    do {
      d.frame = RMatrix::from_columns({rng.small_vector(n, 3), rng.small_vector(n, 3), rng.small_vector(n, 3)});
    } while (rank(d.frame) != 3);
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    d.direction = d.frame * rng.small_vector(3, 3);
    if (dot(d.c, d.direction) != 0) break;
  }
  return d;
}

inline std::vector<double> to_sphere(const std::vector<double>& y, const std::optional<RVec>& center) {
  const std::vector<double> c = center ? to_doubles(*center) : std::vector<double>(y.size(), 0.0);
  return invert_mu_centered(std::span<const double>(y), std::span<const double>(c));
}

inline void check_sphere(const FunctionOracle& f, const SphereDraw& draw, const ScanOptions& options,
                         SphereResult& out) {
  try {
    out.sphere.emplace(draw.c, draw.frame);
  } catch (const GeometryError& e) {
    out.note = std::string("skipped: ") + e.what();
    return;
  }
  const SphereThroughOrigin& s = *out.sphere;
  const std::size_t n = s.dimension();
  if (dot(draw.c, draw.direction) == 0) {
    out.sphere.reset();
    out.note = "skipped: no second-chart center found";
    return;
  }
  // Chart 1: f o mu on the plane mu(S), around mu(c_W).
  const AffinePlane2 plane1 = sphere_to_plane(s);
  out.chart1 = check_plane_analytic(pull_back_by_inversion(f, zeros(n)), plane1, options.window, options.order,
                                    options.tolerance);
  // Chart 2: f o mu_p on mu_p(S) = mu(S - p) + p, around mu_p(0); S - p is
  // the sphere through 0 with coefficient c - 2p.
  out.second_center = s.point_along(draw.direction);
  const RVec& p = out.second_center;
  const AffinePlane2 shifted = sphere_to_plane(SphereThroughOrigin(draw.c - Rational(2) * p, draw.frame));
  const RVec base2 = p - (1 / norm2(p)) * p;
  const AffinePlane2 plane2(base2, shifted.u(), shifted.v());
  out.chart2 = check_plane_analytic(pull_back_by_inversion(f, p), plane2, options.window, options.order,
                                    options.tolerance);

  out.residual = std::max(out.chart1->residual, out.chart2->residual);
  if (out.chart1->verdict != Verdict::kPass) {
    out.verdict = out.chart1->verdict;
    out.failing_chart = 1;
    if (out.chart1->witness) out.witness = to_sphere(*out.chart1->witness, std::nullopt);
  } else if (out.chart2->verdict != Verdict::kPass) {
    out.verdict = out.chart2->verdict;
    out.failing_chart = 2;
    if (out.chart2->witness) out.witness = to_sphere(*out.chart2->witness, p);
  }
}

}  // namespace detail

// Draws `count` spheres through the origin inside B(1) (|c| < 1; W = R^3
// when n = 3, otherwise a random integer 3-frame), then checks each through
// two inversion charts. Drawing is sequential and checks write to their own
// slot, so the report does not depend on the worker count.
inline ScanReport sphere_scan(const FunctionOracle& f, const ScanOptions& options) {
  const std::size_t n = f.dimension();
  if (n < 3) throw ConfigError("sphere scans need n >= 3");
  if (options.workers == 0) throw ConfigError("worker count must be at least 1");
  SeededRng rng(options.seed);
  std::vector<detail::SphereDraw> draws;
  draws.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) draws.push_back(detail::draw_sphere(rng, n));

  ScanReport report{options, 0, 0, std::vector<SphereResult>(options.count)};
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(options.workers, std::max<std::size_t>(1, options.count)));
  std::vector<std::exception_ptr> errors(workers);
  auto job = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < options.count; i += workers) detail::check_sphere(f, draws[i], options, report.results[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& r : report.results) {
    if (!r.sphere) continue;
    ++report.checked;
    if (r.verdict == Verdict::kPass) ++report.passed;
  }
  return report;
}

}  // namespace analytica
