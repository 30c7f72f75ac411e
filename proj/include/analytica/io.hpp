#pragma once

// JSON encodings. Rationals are strings "p" or "p/q"; form coefficients
// split into decimal-string "num" and "den". Non-finite doubles become null
// (residuals) or the string "inf" (convergence radii).

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "analytica/certify.hpp"
#include "analytica/errors.hpp"
#include "analytica/forms.hpp"
#include "analytica/geometry.hpp"
#include "analytica/interpolation.hpp"
#include "analytica/rational.hpp"
#include "analytica/taylor.hpp"

namespace analytica::io {

using nlohmann::json;

inline json rational_json(const Rational& q) { return q.get_str(); }

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw Error("expected a rational as a string or an integer, got " + j.dump());
}

inline json vector_json(std::span<const Rational> v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rational_json(x));
  return out;
}

inline RVec vector_from_json(const json& j) {
  if (!j.is_array()) throw Error("expected an array of rationals, got " + j.dump());
  RVec out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

inline json doubles_json(const std::vector<double>& v) { return json(v); }

inline json residual_json(double r) { return std::isfinite(r) ? json(r) : json(nullptr); }

inline json form_json(const HomogeneousForm& f) {
  json terms = json::array();
  for (const auto& [exp, c] : f.terms()) {
    terms.push_back({{"exp", exp}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  }
  return {{"n", f.dimension()}, {"d", f.degree()}, {"terms", terms}};
}

inline HomogeneousForm form_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto d = j.at("d").get<unsigned>();
    HomogeneousForm::Terms terms;
    for (const auto& t : j.at("terms")) {
      Rational c(mpz_class(t.at("num").get<std::string>(), 10), mpz_class(t.at("den").get<std::string>(), 10));
      if (c.get_den() == 0) throw Error("zero denominator");
      c.canonicalize();
      terms[t.at("exp").get<MultiIndex>()] += c;
    }
    return HomogeneousForm(n, d, std::move(terms));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed form JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(std::string("malformed form JSON: ") + e.what());
  }
}

// "chart" lists the n-1 basis vectors (matrix columns) of the hyperplane.
inline json restrictions_json(unsigned d, const std::vector<HyperplaneRestriction>& rs) {
  json list = json::array();
  for (const auto& r : rs) {
    json chart = json::array();
    for (const auto& col : r.chart.columns()) chart.push_back(vector_json(col));
    list.push_back({{"normal", vector_json(r.hyperplane.normal())}, {"chart", chart}, {"form", form_json(r.form)}});
  }
  return {{"d", d}, {"restrictions", list}};
}

struct RestrictionFile {
  unsigned d = 0;
  std::vector<HyperplaneRestriction> restrictions;
};

inline RestrictionFile restrictions_from_json(const json& j) {
  try {
    RestrictionFile out{j.at("d").get<unsigned>(), {}};
    for (const auto& r : j.at("restrictions")) {
      std::vector<RVec> cols;
      for (const auto& c : r.at("chart")) cols.push_back(vector_from_json(c));
      HyperplaneRestriction hr{Hyperplane(vector_from_json(r.at("normal"))), RMatrix::from_columns(cols),
                               form_from_json(r.at("form"))};
      hr.validate();
      out.restrictions.push_back(std::move(hr));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed restriction JSON: ") + e.what());
  }
}

inline json radius_json(const std::optional<double>& r) {
  if (!r) return nullptr;
  if (std::isinf(*r)) return "inf";
  return *r;
}

inline json tower_json(const TowerBuild& t) {
  json forms = json::array();
  for (const auto& f : t.tower.forms()) forms.push_back(form_json(f));
  json radii = json::array();
  for (const auto& l : t.line_radii) radii.push_back({{"direction", vector_json(l.direction)}, {"radius", radius_json(l.radius)}});
  return {{"R", t.tower.order()},
          {"forms", forms},
          {"diagnostics", {{"per_degree_residual", t.per_degree_residual}, {"line_radii", radii}}}};
}

inline json plane_json(const AffinePlane2& q) {
  return {{"base", vector_json(q.base())}, {"u", vector_json(q.u())}, {"v", vector_json(q.v())}};
}

inline json plane_report_json(const PlaneReport& r) {
  return {{"plane", plane_json(r.plane)},
          {"fit_degree", r.fit_degree},
          {"residual", residual_json(r.residual)},
          {"verdict", to_string(r.verdict)},
          {"witness", r.witness ? json(*r.witness) : json(nullptr)},
          {"exact_path", r.exact_path}};
}

inline json sphere_json(const SphereThroughOrigin& s) {
  json frame = json::array();
  for (const auto& col : s.frame().columns()) frame.push_back(vector_json(col));
  return {{"c", vector_json(s.c())}, {"frame", frame}};
}

// Worker count is deliberately absent: it must not change the bytes.
inline json scan_config_json(const ScanOptions& o) {
  return {{"count", o.count},   {"seed", o.seed}, {"order", o.order}, {"tol", o.tolerance},
          {"window", rational_json(o.window)}};
}

inline json scan_report_json(const ScanReport& r) {
  json failures = json::array();
  json skipped = json::array();
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const auto& s = r.results[i];
    if (!s.sphere) {
      skipped.push_back({{"index", i}, {"note", s.note}});
      continue;
    }
    if (s.verdict == Verdict::kPass) continue;
    failures.push_back({{"index", i},
                        {"sphere", sphere_json(*s.sphere)},
                        {"witness", s.witness ? json(*s.witness) : json(nullptr)},
                        {"residual", residual_json(s.residual)},
                        {"verdict", to_string(s.verdict)},
                        {"chart", s.failing_chart}});
  }
  return {{"checked", r.checked},
          {"passed", r.passed},
          {"failures", failures},
          {"skipped", skipped},
          {"config", scan_config_json(r.options)}};
}

inline json certify_report_json(const CertifyReport& r) {
  return {{"hypothesis", plane_report_json(r.hypothesis)},
          {"tower", r.tower ? tower_json(*r.tower) : json(nullptr)},
          {"agreement_residual", residual_json(r.agreement_residual)},
          {"sweep_residuals", [&] {
             json a = json::array();
             for (double x : r.sweep_residuals) a.push_back(residual_json(x));
             return a;
           }()},
          {"eta", rational_json(r.eta)},
          {"verdict", to_string(r.verdict)},
          {"witness", r.witness ? json(*r.witness) : json(nullptr)}};
}

}  // namespace analytica::io
