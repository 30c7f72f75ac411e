#pragma once

// Command-line front end. Exit codes: 0 success or pass, 1 usage or input
// error, 2 the tool ran and a diagnostic failed.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analytica/analytica.hpp"

namespace analytica::cli {

inline constexpr std::uint64_t kDefaultSeed = 24301;
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDiagnostic = 2;

using nlohmann::json;

// --seed, then ANALYTICA_SEED, then the built-in constant.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ANALYTICA_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 10);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("ANALYTICA_SEED is not an unsigned integer: ") + env);
  }
  return kDefaultSeed;
}

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// "1,0,0;0,1,0" -> two vectors.
inline std::vector<RVec> parse_vectors(const std::string& text) {
  std::vector<RVec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_point(item));
  return out;
}

struct OracleArgs {
  std::string expr;
  std::string builtin;
  std::string guard;
  std::size_t n = 0;

  void attach(CLI::App* app) {
    auto* e = app->add_option("--expr", expr, "rational expression in x1..xn");
    auto* b = app->add_option("--builtin", builtin, "hartogs-f or curve-g");
    e->excludes(b);
    app->add_option("--n", n, "dimension");
    app->add_option("--guard", guard, "guard point and value, e.g. \"0,0,0=0\"");
  }

  FunctionOracle build(std::size_t default_n = 3) const {
    const std::size_t dim = n ? n : default_n;
    if (!builtin.empty()) {
      if (!guard.empty()) throw ConfigError("--guard cannot be combined with --builtin");
      return builtin_counterexample(builtin, dim);
    }
    if (expr.empty()) throw ConfigError("one of --expr or --builtin is required");
    if (!n) throw ConfigError("--expr needs --n");
    std::optional<Guard> g;
    if (!guard.empty()) g = parse_guard(guard);
    return FunctionOracle(parse_expression(expr, dim), g);
  }
};

inline std::string scan_csv(const ScanReport& r) {
  std::string out = "sphere,residual\n";
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    if (!r.results[i].sphere) continue;
    out += std::to_string(i) + "," + format_double(r.results[i].residual) + "\n";
  }
  return out;
}

// Samples t -> (f(t p), T(t p)) at t = k eta / 20, k = -20..20.
inline std::string line_csv(const FunctionOracle& f, const TaylorTower& t, const RVec& p, const Rational& eta) {
  std::string out = "t,f,T\n";
  for (int k = -20; k <= 20; ++k) {
    const Rational s = ratio(k, 20) * eta;
    const RVec x = s * p;
    std::string fv;
    try {
      fv = format_double(to_double(f.evaluate_exact(x)));
    } catch (const PoleError&) {
      fv = "nan";
    }
    out += format_double(to_double(s)) + "," + fv + "," + format_double(to_double(tower_evaluate(t, x))) + "\n";
  }
  return out;
}

inline int run_probe(const OracleArgs& oa, const ScanOptions& opts, const std::string& out,
                     const std::string& plot) {
  const FunctionOracle f = oa.build();
  const ScanReport report = sphere_scan(f, opts);
  write_json(out, io::scan_report_json(report));
  if (!plot.empty()) write_text(plot, scan_csv(report));
  return report.passed == report.checked ? kOk : kDiagnostic;
}

inline int run_tower(const OracleArgs& oa, const std::string& axis, const Rational& theta, const Rational& eta,
                     unsigned order, std::uint64_t seed, const std::string& out, const std::string& plot_dir,
                     bool certify, double tol) {
  const FunctionOracle f = oa.build();
  const std::size_t n = f.dimension();
  std::vector<RVec> basis = axis.empty() ? std::vector<RVec>{unit_vector(n, 0), unit_vector(n, 1)} : parse_vectors(axis);
  if (basis.size() != 2) throw ConfigError("--axis needs two vectors separated by ';'");
  const VectorPlane2 v(basis[0], basis[1]);
  if (certify) {
    const AffinePlane2 q(zeros(n), basis[0], basis[1]);
    CertifyOptions co;
    co.aperture = theta;
    co.eta = eta;
    co.order = order;
    co.tolerance = tol;
    co.seed = seed;
    const CertifyReport r = certify_near_plane(f, q, co);
    json j = io::certify_report_json(r);
    j["config"] = {{"theta", io::rational_json(theta)}, {"eta", io::rational_json(eta)}, {"order", order},
                   {"seed", seed}, {"tol", tol}};
    write_json(out, j);
    return r.verdict == Verdict::kPass ? kOk : kDiagnostic;
  }
  TowerBuild t = [&] {
    try {
      return build_tower(f, Cone(v, theta, eta), order, seed);
    } catch (const TowerError& e) {
      json j = {{"error", e.what()},
                {"direction", e.direction() ? io::vector_json(*e.direction()) : json(nullptr)},
                {"degree", e.degree() ? json(*e.degree()) : json(nullptr)}};
      write_json(out, j);
      throw;
    }
  }();
  json j = io::tower_json(t);
  j["config"] = {{"theta", io::rational_json(theta)}, {"eta", io::rational_json(eta)}, {"seed", seed}};
  write_json(out, j);
  if (!plot_dir.empty()) {
    std::filesystem::create_directories(plot_dir);
    for (std::size_t i = 0; i < t.line_radii.size(); ++i) {
      write_text((std::filesystem::path(plot_dir) / ("line" + std::to_string(i) + ".csv")).string(),
                 line_csv(f, t.tower, t.line_radii[i].direction, eta));
    }
  }
  return kOk;
}

inline std::string csv_cell(const json& v) { return v.is_null() ? "nan" : format_double(v.get<double>()); }

inline json value_row(const FunctionOracle& f, const RVec& x) {
  try {
    return to_double(f.evaluate_exact(x));
  } catch (const PoleError&) {
    return nullptr;
  }
}

inline int run_counterexamples(const std::string& name, std::size_t n, const ScanOptions& scan, const std::string& out,
                               const std::string& plot) {
  const FunctionOracle f = builtin_counterexample(name, n);
  json report = {{"name", name}, {"n", n}};
  const std::vector<Rational> ts{Rational(1, 2), Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
  std::string csv;
  json paths = json::array();
  bool detected = false;
  if (name == "hartogs-f") {
    csv = "t,diagonal,axis\n";
    for (const auto& t : ts) {
      const json d = value_row(f, RVec(n, t));
      const json a = value_row(f, t * unit_vector(n, 0));
      paths.push_back({{"t", to_double(t)}, {"diagonal", d}, {"axis", a}});
      csv += format_double(to_double(t)) + "," + csv_cell(d) + "," + csv_cell(a) + "\n";
    }
    // Translates of coordinate hyperplanes, checked on a 2-plane inside each.
    json slices = json::array();
    bool slices_pass = true;
    for (std::size_t k = 0; k < n; ++k) {
      for (const Rational& c : {Rational(1, 10), Rational(-1, 10), Rational(1, 2), Rational(1)}) {
        const AffinePlane2 q(c * unit_vector(n, k), unit_vector(n, (k + 1) % n), unit_vector(n, (k + 2) % n));
        const PlaneReport r = check_plane_analytic(f, q, Rational(1, 100), 8, scan.tolerance);
        slices_pass = slices_pass && r.verdict == Verdict::kPass;
        slices.push_back({{"coordinate", k + 1}, {"c", io::rational_json(c)}, {"residual", io::residual_json(r.residual)},
                          {"verdict", to_string(r.verdict)}});
      }
    }
    report["slices"] = slices;
    report["slices_pass"] = slices_pass;
    detected = slices_pass;
  } else {
    csv = "t,axis,cusp\n";
    for (const auto& t : ts) {
      const RVec axis{t, 0, 0};
      const RVec cusp{power(t, 3), power(t, 2), power(t, 15)};
      const json a = value_row(f, axis);
      const json c = value_row(f, cusp);
      paths.push_back({{"t", to_double(t)}, {"axis", a}, {"cusp", c}});
      csv += format_double(to_double(t)) + "," + csv_cell(a) + "," + csv_cell(c) + "\n";
    }
    const AffinePlane2 z0(zeros(3), unit_vector(3, 0), unit_vector(3, 1));
    const PlaneReport r = check_plane_analytic(f, z0, Rational(1, 2), 6, scan.tolerance);
    report["plane_z0"] = io::plane_report_json(r);
    detected = r.verdict != Verdict::kPass;
  }
  report["paths"] = paths;
  json scan_json = nullptr;
  if (scan.count > 0 && n >= 3) {
    const ScanReport s = sphere_scan(f, scan);
    scan_json = io::scan_report_json(s);
    detected = detected && s.passed < s.checked;
  }
  report["sphere_scan"] = scan_json;
  report["counterexample_detected"] = detected;
  write_json(out, report);
  if (!plot.empty()) write_text(plot, csv);
  return detected ? kDiagnostic : kOk;
}

inline int run_invert(const std::string& point, const std::string& center, const std::string& sphere_file,
                      const std::string& out) {
  if (point.empty() == sphere_file.empty()) throw ConfigError("invert needs exactly one of --point or --sphere-json");
  if (!point.empty()) {
    const RVec x = parse_point(point);
    const RVec y = center.empty() ? invert_mu(x) : invert_mu_centered(x, parse_point(center));
    write_json(out, {{"point", io::vector_json(x)}, {"image", io::vector_json(y)}});
    return kOk;
  }
  const json j = read_json(sphere_file);
  std::vector<RVec> cols;
  try {
    for (const auto& c : j.at("frame")) cols.push_back(io::vector_from_json(c));
    const RVec c = io::vector_from_json(j.at("c"));
    const SphereThroughOrigin s(c, RMatrix::from_columns(cols));
    write_json(out, {{"sphere", io::sphere_json(s)}, {"plane", io::plane_json(sphere_to_plane(s))},
                     {"inside_unit_ball", s.inside_unit_ball()}});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sphere JSON: ") + e.what());
  }
  return kOk;
}

inline int run_reconstruct_glue(const std::string& input, const std::string& out) {
  const io::RestrictionFile file = io::restrictions_from_json(read_json(input));
  if (file.restrictions.empty()) throw ConfigError("restriction file has no restrictions");
  try {
    write_json(out, io::form_json(glue_hyperplanes(file.d, file.restrictions)));
  } catch (const InterpolationError& e) {
    write_json(out, {{"error", e.what()}});
    std::cerr << "analytica: " << e.what() << "\n";
    return kDiagnostic;
  }
  return kOk;
}

inline int run_reconstruct_cone(const OracleArgs& oa, unsigned degree, const std::string& axis, const Rational& theta,
                                std::uint64_t seed, const std::string& out) {
  const FunctionOracle f = oa.build();
  const std::size_t n = f.dimension();
  std::vector<RVec> basis = axis.empty() ? std::vector<RVec>{unit_vector(n, 0), unit_vector(n, 1)} : parse_vectors(axis);
  if (basis.size() != 2) throw ConfigError("--axis needs two vectors separated by ';'");
  const Cone cone(VectorPlane2(basis[0], basis[1]), theta);
  try {
    const ConeReconstruction r =
        reconstruct_form_from_cone(degree, [&](const RVec& p) { return f.evaluate_exact(p); }, cone, seed);
    write_json(out, {{"form", io::form_json(r.form)},
                     {"fit_samples", r.fit_samples},
                     {"held_out_samples", r.held_out_samples},
                     {"attempts", r.attempts},
                     {"held_out_residual", io::rational_json(r.held_out_residual)}});
  } catch (const InterpolationError& e) {
    write_json(out, {{"error", e.what()}});
    std::cerr << "analytica: " << e.what() << "\n";
    return kDiagnostic;
  }
  return kOk;
}

inline int run(int argc, char** argv) {
  CLI::App app{"Exact reconstruction and analyticity diagnostics for rational functions", "analytica"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  std::string out;
  unsigned workers = 1;
  double tol = kDefaultTolerance;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_flag, "random seed (default: ANALYTICA_SEED or a fixed constant)");
    sub->add_option("--out", out, "report path (default: stdout)");
  };

  OracleArgs oracle;
  std::size_t spheres = 100;
  unsigned order = 6;
  std::string window_text = "1/20";
  std::string plot;

  auto* probe = app.add_subcommand("probe", "scan spheres through the origin for non-analytic restrictions");
  oracle.attach(probe);
  common(probe);
  probe->add_option("--spheres", spheres, "number of spheres")->capture_default_str();
  probe->add_option("--tol", tol, "relative fit tolerance")->capture_default_str();
  probe->add_option("--order", order, "fit degree")->capture_default_str();
  probe->add_option("--window", window_text, "chart window radius")->capture_default_str();
  probe->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  probe->add_option("--plot", plot, "CSV of per-sphere residuals");

  auto* reconstruct = app.add_subcommand("reconstruct", "rebuild a homogeneous form");
  reconstruct->require_subcommand(1);
  std::string input;
  auto* glue = reconstruct->add_subcommand("glue", "glue restrictions to hyperplanes");
  glue->add_option("--input", input, "restriction JSON")->required();
  common(glue);
  unsigned degree = 0;
  std::string axis;
  std::string theta_text = "1/2";
  auto* cone = reconstruct->add_subcommand("cone", "recover a form from its values on a cone");
  oracle.attach(cone);
  common(cone);
  cone->add_option("--degree", degree, "form degree")->required();
  cone->add_option("--axis", axis, "axis plane, e.g. \"1,0,0;0,1,0\"");
  cone->add_option("--theta", theta_text, "cone aperture")->capture_default_str();

  auto* tower = app.add_subcommand("tower", "assemble the Taylor tower on a cone");
  oracle.attach(tower);
  common(tower);
  std::string tower_theta = "3/10";
  std::string eta_text = "1/10";
  std::string plot_dir;
  bool certify = false;
  tower->add_option("--axis", axis, "axis plane, e.g. \"1,0,0;0,1,0\"");
  tower->add_option("--theta", tower_theta, "cone aperture")->capture_default_str();
  tower->add_option("--eta", eta_text, "cone window radius")->capture_default_str();
  tower->add_option("--order", order, "truncation order R")->capture_default_str();
  tower->add_option("--plot-dir", plot_dir, "directory for per-line CSV files");
  tower->add_flag("--certify", certify, "also certify near the axis plane");
  tower->add_option("--tol", tol, "relative tolerance for --certify")->capture_default_str();

  auto* counter = app.add_subcommand("counterexamples", "run the detection suite on a builtin counterexample");
  std::string name;
  std::size_t counter_n = 3;
  std::size_t counter_spheres = 20;
  counter->add_option("--name", name, "hartogs-f or curve-g")->required();
  counter->add_option("--n", counter_n, "dimension")->capture_default_str();
  counter->add_option("--spheres", counter_spheres, "spheres to scan")->capture_default_str();
  counter->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  counter->add_option("--plot", plot, "CSV of path values");
  common(counter);

  auto* invert = app.add_subcommand("invert", "apply the inversion to a point or a sphere");
  std::string point, center, sphere_file;
  invert->add_option("--point", point, "point to invert");
  invert->add_option("--center", center, "inversion center (default: origin)");
  invert->add_option("--sphere-json", sphere_file, "sphere {\"c\": [...], \"frame\": [[...]...]}");
  invert->add_option("--out", out, "report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const std::uint64_t seed = resolve_seed(seed_flag);
    if (*probe) {
      ScanOptions o;
      o.count = spheres;
      o.seed = seed;
      o.order = order;
      o.tolerance = tol;
      o.window = parse_rational(window_text);
      o.workers = workers;
      return run_probe(oracle, o, out, plot);
    }
    if (*glue) return run_reconstruct_glue(input, out);
    if (*cone) return run_reconstruct_cone(oracle, degree, axis, parse_rational(theta_text), seed, out);
    if (*tower) {
      return run_tower(oracle, axis, parse_rational(tower_theta), parse_rational(eta_text), order, seed, out, plot_dir,
                       certify, tol);
    }
    if (*counter) {
      ScanOptions o;
      o.count = counter_spheres;
      o.seed = seed;
      o.tolerance = tol;
      o.workers = workers;
      return run_counterexamples(name, counter_n, o, out, plot);
    }
    if (*invert) return run_invert(point, center, sphere_file, out);
  } catch (const TowerError& e) {
    std::cerr << "analytica: " << e.what() << "\n";
    return kDiagnostic;
  } catch (const std::exception& e) {
    std::cerr << "analytica: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace analytica::cli
