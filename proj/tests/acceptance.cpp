// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace analytica;
using analytica::testing::random_form;
using analytica::testing::random_hyperplanes;
using analytica::testing::random_nonzero_point;
using analytica::testing::random_point;
using analytica::testing::random_sphere;
using analytica::testing::random_sphere_point;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<HyperplaneRestriction> restrict_all(const HomogeneousForm& g, const std::vector<Hyperplane>& hs) {
  std::vector<HyperplaneRestriction> out;
  for (const auto& h : hs) out.push_back(restrict_to_hyperplane(g, h));
  return out;
}

Cone axis_cone(std::size_t n) { return Cone(VectorPlane2(unit_vector(n, 0), unit_vector(n, 1)), Rational(1, 2)); }

VectorPlane2 random_vector_plane(SeededRng& rng, std::size_t n) {
  for (;;) {
    const RVec a = random_nonzero_point(rng, n, 5, 3), b = random_nonzero_point(rng, n, 5, 3);
    if (rank_of_columns({a, b}) == 2) return VectorPlane2(a, b);
  }
}

Outcome round_trip() {
  Outcome o;
  SeededRng rng(101);
  const auto start = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 2));
    const auto d = static_cast<unsigned>(rng.uniform_int(0, 5));
    const HomogeneousForm g = random_form(rng, n, d);
    o.require(glue_hyperplanes(d, restrict_all(g, random_hyperplanes(rng, n, d + 1))) == g,
              "mismatch at trial " + std::to_string(trial));
  }
  const double t = seconds_since(start);
  o.require(t < 30, "took " + std::to_string(t) + " s");
  if (o.ok) o.detail = "200 forms exact in " + std::to_string(t) + " s";
  return o;
}

Outcome uniqueness() {
  Outcome o;
  SeededRng rng(102);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 2));
    const auto d = static_cast<unsigned>(rng.uniform_int(1, 5));
    const HomogeneousForm g = random_form(rng, n, d);
    const HomogeneousForm a = glue_hyperplanes(d, restrict_all(g, random_hyperplanes(rng, n, d + 1)));
    const HomogeneousForm b = glue_hyperplanes(d, restrict_all(g, random_hyperplanes(rng, n, d + 1)));
    o.require(a == b, "instance " + std::to_string(trial) + " differs");
  }
  if (o.ok) o.detail = "50 instances identical";
  return o;
}

Outcome cone_reconstruction() {
  Outcome o;
  SeededRng rng(103);
  const auto start = Clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 2));
    const auto d = static_cast<unsigned>(rng.uniform_int(0, 4));
    const HomogeneousForm g = random_form(rng, n, d);
    const Cone cone(random_vector_plane(rng, n), Rational(1, 2));
    const auto sigma = [&](const RVec& p) -> Rational { return evaluate_form(g, p); };
    const ConeReconstruction r = reconstruct_form_from_cone(d, sigma, cone, rng.next());
    o.require(r.form == g, "wrong form at trial " + std::to_string(trial));
    o.require(r.held_out_residual == 0, "held-out residual at trial " + std::to_string(trial));
  }
  bool rejected = false;
  try {
    reconstruct_form_from_cone(1, [](const RVec& p) -> Rational { return norm2(p); }, axis_cone(3), 7);
  } catch (const NotPolynomialError&) {
    rejected = true;
  }
  o.require(rejected, "|p|^2 accepted as a linear form");
  const double t = seconds_since(start);
  o.require(t < 60, "took " + std::to_string(t) + " s");
  if (o.ok) o.detail = "100 forms exact, |p|^2 rejected, " + std::to_string(t) + " s";
  return o;
}

Outcome polynomial_towers() {
  Outcome o;
  SeededRng rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    const auto degree = static_cast<unsigned>(rng.uniform_int(0, 5));
    std::string text = random_form(rng, 3, 0, 50).to_string();
    for (unsigned d = 1; d <= degree; ++d) text += " + " + random_form(rng, 3, d, 50).to_string();
    const FunctionOracle f(parse_expression(text, 3));
    const TowerBuild b = build_tower(f, axis_cone(3), 6, rng.next());
    for (unsigned r = degree + 1; r <= 6; ++r)
      o.require(b.tower[r].is_zero(), "T_" + std::to_string(r) + " nonzero at trial " + std::to_string(trial));
    for (int k = 0; k < 50; ++k) {
      const RVec p = random_point(rng, 3);
      o.require(tower_evaluate(b.tower, p) == f.evaluate_exact(p), "value mismatch at trial " + std::to_string(trial));
    }
  }
  if (o.ok) o.detail = "20 polynomials reproduced at 50 points each";
  return o;
}

Outcome geometric_series() {
  Outcome o;
  const FunctionOracle f(parse_expression("1/(1-x1)", 3));
  const TowerBuild b = build_tower(f, axis_cone(3), 8, 105);
  for (unsigned r = 0; r <= 8; ++r)
    o.require(b.tower[r] == factorial(r) * HomogeneousForm::monomial({r, 0, 0}), "T_" + std::to_string(r) + " wrong");
  const auto e1 = line_convergence_radius(b.tower, unit_vector(3, 0));
  const auto e2 = line_convergence_radius(b.tower, unit_vector(3, 1));
  o.require(e1 && *e1 >= 0.9 && *e1 <= 1.1, "radius along e1 out of range");
  o.require(e2 && std::isinf(*e2), "radius along e2 not infinite");
  if (o.ok) o.detail = "T_r = r! x1^r, radius(e1) = " + std::to_string(*e1) + ", radius(e2) = inf";
  return o;
}

Outcome hartogs() {
  Outcome o;
  const auto start = Clock::now();
  const FunctionOracle f = builtin_counterexample("hartogs-f", 3);
  int slices = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (const Rational& c : {Rational(1, 10), Rational(-1, 10), Rational(1, 2), Rational(-1, 2), Rational(1)}) {
      const AffinePlane2 q(c * unit_vector(3, k), unit_vector(3, (k + 1) % 3), unit_vector(3, (k + 2) % 3));
      const PlaneReport r = check_plane_analytic(f, q, Rational(1, 100), 8, 1e-9);
      o.require(r.verdict == Verdict::kPass, "slice x" + std::to_string(k + 1) + " = " + c.get_str() + " fails");
      ++slices;
    }
  }
  const double diagonal = to_double(f.evaluate_exact(RVec(3, Rational(1, 10))));
  o.require(std::abs(diagonal - 1000.0 / 3) <= 1e-12 * (1000.0 / 3), "diagonal value " + std::to_string(diagonal));
  ScanOptions options;
  options.count = 100;
  options.seed = 106;
  const ScanReport s = sphere_scan(f, options);
  o.require(s.passed < s.checked, "no sphere failed");
  const double t = seconds_since(start);
  o.require(t < 60, "took " + std::to_string(t) + " s");
  if (o.ok)
    o.detail = std::to_string(slices) + " slices pass, " + std::to_string(s.checked - s.passed) + "/" +
               std::to_string(s.checked) + " spheres fail, " + std::to_string(t) + " s";
  return o;
}

Outcome curve_g() {
  Outcome o;
  const FunctionOracle g = builtin_counterexample("curve-g", 3);
  const Rational t(1, 100);
  const double axis = to_double(abs(g.evaluate_exact(RVec{t, 0, 0})));
  const double cusp = to_double(g.evaluate_exact(RVec{power(t, 3), power(t, 2), power(t, 15)}));
  o.require(axis < 1e-7, "axis value " + std::to_string(axis));
  o.require(cusp > 1e6, "cusp value " + std::to_string(cusp));
  const PlaneReport r =
      check_plane_analytic(g, AffinePlane2(zeros(3), unit_vector(3, 0), unit_vector(3, 1)), Rational(1, 2), 6);
  o.require(r.verdict != Verdict::kPass, "plane z = 0 passes");
  o.require(r.witness.has_value(), "no witness on z = 0");
  if (o.ok) o.detail = std::string("discontinuous at 0, z = 0 verdict ") + to_string(r.verdict);
  return o;
}

Outcome inversion() {
  Outcome o;
  SeededRng rng(107);
  for (int k = 0; k < 10000; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 3));
    const RVec x = random_nonzero_point(rng, n);
    const RVec y = invert_mu(x);
    o.require(invert_mu(y) == x, "mu is not an involution at " + to_string(x));
    o.require(norm2(y) * norm2(x) == 1, "|mu(x)||x| != 1 at " + to_string(x));
  }
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform_int(0, 1));
    const SphereThroughOrigin s = random_sphere(rng, n);
    const SphereThroughOrigin back = plane_to_sphere(sphere_to_plane(s), s.frame());
    o.require(back.same_sphere(s), "round trip changed sphere " + std::to_string(k));
    for (int j = 0; j < 100; ++j) {
      const RVec x = random_sphere_point(rng, s);
      o.require(dot(s.c(), invert_mu(x)) == 1, "c.mu(x) != 1 on sphere " + std::to_string(k));
    }
  }
  if (o.ok) o.detail = "10^4 points, 100 spheres x 100 points exact";
  return o;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "analytica_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<std::string> outputs;
  for (const char* workers : {"1", "8"}) {
    const auto out = dir / (std::string("probe_") + workers + ".json");
    const std::string cmd = std::string(ANALYTICA_CLI_PATH) + " probe --builtin hartogs-f --spheres 40 --seed 108" +
                            " --workers " + workers + " --out " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    o.require(WIFEXITED(status) && WEXITSTATUS(status) == 2, std::string("unexpected exit at --workers ") + workers);
    outputs.push_back(slurp(out));
  }
  std::filesystem::remove_all(dir);
  o.require(!outputs[0].empty(), "empty report");
  o.require(outputs[0] == outputs[1], "reports differ");
  if (o.ok) o.detail = std::to_string(outputs[0].size()) + " bytes identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"restrict-and-glue round trip", round_trip},
      {"gluing uniqueness", uniqueness},
      {"cone reconstruction", cone_reconstruction},
      {"polynomial towers", polynomial_towers},
      {"geometric series tower", geometric_series},
      {"hartogs-f", hartogs},
      {"curve-g", curve_g},
      {"inversion geometry", inversion},
      {"probe determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.ok ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
