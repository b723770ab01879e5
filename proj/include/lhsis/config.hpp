#pragma once

// Run configuration: a JSON document, schema version 1.
//
//   {
//     "schema_version": 1,
//     "algebra": "b2" | "h4" | "h6",
//     "chart": "cartesian" | "epidemic",            (default "epidemic")
//     "coefficients": { "rho0": ..., "b": ..., "b1": ..., "b2": ..., "b4": ..., "b5": ... },
//     "t0": 0, "t1": 5, "a": t0, "samples": 200, "tolerance": 1e-10,
//     "q0": ..., "p0": ...   or   "x0": ..., "y0": ...,
//     "quadrature": { "abs_tol": 1e-13, "rel_tol": 1e-13, "max_depth": 40 },
//     "constants": { "c1": ..., "c2": ... },
//     "superposition": { "particulars": [ {"q": .., "p": ..} | {"x": .., "y": ..}, ... ] },
//     "convert": { "input": "trajectory.csv" },
//     "verify": { "points": 200, "draws": 3 }
//   }
//
// A coefficient is a number, an expression string in t, or a table
// { "times": [...], "values": [...], "order": 1 | 3 }. Coefficients may also
// be given at the top level. "b" names b2 and is accepted for every algebra.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lhsis/coeffs.hpp"
#include "lhsis/dynamics.hpp"
#include "lhsis/error.hpp"
#include "lhsis/transform.hpp"

namespace lhsis {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  int schema_version = kSchemaVersion;
  AlgebraId algebra = AlgebraId::B2;
  ChartId chart = ChartId::Epidemic;
  Coefficients coefficients;
  double a = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  int samples = 200;
  double tolerance = 1e-10;
  QuadratureConfig quadrature;
  std::optional<PhaseState> initial;
  std::optional<IntegrationConstants> constants;
  std::vector<PhaseState> particulars;
  std::optional<std::filesystem::path> convert_input;
  int verify_points = 200;
  int verify_draws = 3;

  SystemSpec spec() const { return SystemSpec(algebra, chart, coefficients, a, quadrature); }
  std::vector<double> times() const { return linspace(t0, t1, samples); }
};

namespace detail {

using json = nlohmann::json;

inline std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(join(path, it.key()), "unknown field");
  }
}

inline const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  return v;
}

inline double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
  return d;
}

inline int integer_at(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

inline std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> numbers_at(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline TimeFunction coefficient_at(const json& v, const std::string& path) {
  try {
    if (v.is_number()) return TimeFunction::constant(number_at(v, path));
    if (v.is_string()) return parse_expression(v.get<std::string>());
    if (v.is_object()) {
      only_keys(v, path, {"times", "values", "order"});
      if (!v.contains("times")) throw ConfigError(join(path, "times"), "missing");
      if (!v.contains("values")) throw ConfigError(join(path, "values"), "missing");
      int order = 1;
      if (v.contains("order")) order = integer_at(v["order"], join(path, "order"));
      if (order != 1 && order != 3) throw ConfigError(join(path, "order"), "must be 1 (linear) or 3 (cubic)");
      return TimeFunction::table(numbers_at(v["times"], join(path, "times")),
                                 numbers_at(v["values"], join(path, "values")),
                                 order == 3 ? Interpolation::Cubic : Interpolation::Linear);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a number, an expression string or a table");
}

inline PhaseState point_at(const json& v, const std::string& path) {
  require_object(v, path);
  if (v.contains("q") || v.contains("p")) {
    only_keys(v, path, {"q", "p"});
    if (!v.contains("q") || !v.contains("p")) throw ConfigError(path, "both q and p are required");
    return PhaseState::epidemic(number_at(v["q"], join(path, "q")), number_at(v["p"], join(path, "p")));
  }
  only_keys(v, path, {"x", "y"});
  if (!v.contains("x") || !v.contains("y")) throw ConfigError(path, "expected {q, p} or {x, y}");
  return PhaseState::cartesian(number_at(v["x"], join(path, "x")), number_at(v["y"], join(path, "y")));
}

inline void check_point(const PhaseState& s, const std::string& path) {
  const bool ok = s.chart == ChartId::Epidemic ? is_regular_epidemic(s.first, s.second)
                                               : is_invertible_cartesian(s.first, s.second);
  if (!ok) throw ConfigError(path, "state lies on a pole of the canonical transformation");
}

}  // namespace detail

/// Parses and validates a configuration document. Relative paths are
/// resolved against base_dir.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  detail::require_object(doc, "");

  static const char* coeff_names[] = {"rho0", "b", "b1", "b2", "b4", "b5"};
  detail::only_keys(doc, "", {"schema_version", "algebra", "chart", "coefficients", "rho0", "b", "b1", "b2", "b4",
                              "b5", "a", "t0", "t1", "samples", "tolerance", "q0", "p0", "x0", "y0", "quadrature",
                              "constants", "superposition", "convert", "verify"});

  RunConfig cfg;
  if (doc.contains("schema_version")) {
    cfg.schema_version = detail::integer_at(doc["schema_version"], "schema_version");
    if (cfg.schema_version != kSchemaVersion) {
      throw ConfigError("schema_version", "unsupported version " + std::to_string(cfg.schema_version) +
                                              " (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }

  if (!doc.contains("algebra")) throw ConfigError("algebra", "missing");
  const std::string alg = detail::string_at(doc["algebra"], "algebra");
  if (alg == "b2") {
    cfg.algebra = AlgebraId::B2;
  } else if (alg == "h4") {
    cfg.algebra = AlgebraId::H4;
  } else if (alg == "h6") {
    cfg.algebra = AlgebraId::H6;
  } else {
    throw ConfigError("algebra", "expected one of b2, h4, h6");
  }

  if (doc.contains("chart")) {
    const std::string chart = detail::string_at(doc["chart"], "chart");
    if (chart == "cartesian") {
      cfg.chart = ChartId::Cartesian;
    } else if (chart == "epidemic") {
      cfg.chart = ChartId::Epidemic;
    } else {
      throw ConfigError("chart", "expected cartesian or epidemic");
    }
  }

  // Gather coefficients from the block and the top level.
  std::optional<TimeFunction> found[6];
  std::string where[6];
  auto take = [&](const json& obj, const std::string& prefix) {
    for (int i = 0; i < 6; ++i) {
      if (!obj.contains(coeff_names[i])) continue;
      const std::string path = detail::join(prefix, coeff_names[i]);
      if (found[i]) throw ConfigError(path, "coefficient given twice (also at " + where[i] + ")");
      found[i] = detail::coefficient_at(obj[coeff_names[i]], path);
      where[i] = path;
    }
  };
  if (doc.contains("coefficients")) {
    detail::require_object(doc["coefficients"], "coefficients");
    detail::only_keys(doc["coefficients"], "coefficients", {"rho0", "b", "b1", "b2", "b4", "b5"});
    take(doc["coefficients"], "coefficients");
  }
  take(doc, "");
  if (found[1] && found[3]) throw ConfigError(where[1], "\"b\" is an alias of b2; give only one of them");
  if (!found[0]) throw ConfigError("coefficients.rho0", "missing");
  cfg.coefficients.rho0 = *found[0];
  if (found[1]) cfg.coefficients.b2 = *found[1];
  if (found[3]) cfg.coefficients.b2 = *found[3];
  if (found[2]) cfg.coefficients.b1 = *found[2];
  if (found[4]) cfg.coefficients.b4 = *found[4];
  if (found[5]) cfg.coefficients.b5 = *found[5];
  auto forbid = [&](int i) {
    if (found[i] && !found[i]->is_zero()) {
      throw ConfigError(where[i], std::string("not allowed for algebra ") + to_string(cfg.algebra));
    }
  };
  if (cfg.algebra == AlgebraId::B2) forbid(2);
  if (cfg.algebra != AlgebraId::H6) {
    forbid(4);
    forbid(5);
  }

  if (!doc.contains("t0")) throw ConfigError("t0", "missing");
  if (!doc.contains("t1")) throw ConfigError("t1", "missing");
  cfg.t0 = detail::number_at(doc["t0"], "t0");
  cfg.t1 = detail::number_at(doc["t1"], "t1");
  if (cfg.t1 < cfg.t0) throw ConfigError("t1", "must not precede t0");
  cfg.a = doc.contains("a") ? detail::number_at(doc["a"], "a") : cfg.t0;
  if (doc.contains("samples")) {
    cfg.samples = detail::integer_at(doc["samples"], "samples");
    if (cfg.samples < 2) throw ConfigError("samples", "must be at least 2");
  }
  if (doc.contains("tolerance")) {
    cfg.tolerance = detail::number_at(doc["tolerance"], "tolerance");
    if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  }

  if (doc.contains("quadrature")) {
    const json& q = detail::require_object(doc["quadrature"], "quadrature");
    detail::only_keys(q, "quadrature", {"abs_tol", "rel_tol", "max_depth"});
    if (q.contains("abs_tol")) cfg.quadrature.abs_tol = detail::number_at(q["abs_tol"], "quadrature.abs_tol");
    if (q.contains("rel_tol")) cfg.quadrature.rel_tol = detail::number_at(q["rel_tol"], "quadrature.rel_tol");
    if (q.contains("max_depth")) cfg.quadrature.max_depth = detail::integer_at(q["max_depth"], "quadrature.max_depth");
    try {
      cfg.quadrature.validate();
    } catch (const Error& e) {
      throw ConfigError("quadrature", e.what());
    }
  }

  const bool epi = doc.contains("q0") || doc.contains("p0");
  const bool cart = doc.contains("x0") || doc.contains("y0");
  if (epi && cart) throw ConfigError("q0", "give the initial state as q0/p0 or x0/y0, not both");
  if (epi) {
    if (!doc.contains("q0")) throw ConfigError("q0", "missing (p0 given)");
    if (!doc.contains("p0")) throw ConfigError("p0", "missing (q0 given)");
    cfg.initial = PhaseState::epidemic(detail::number_at(doc["q0"], "q0"), detail::number_at(doc["p0"], "p0"));
    detail::check_point(*cfg.initial, "q0");
  } else if (cart) {
    if (!doc.contains("x0")) throw ConfigError("x0", "missing (y0 given)");
    if (!doc.contains("y0")) throw ConfigError("y0", "missing (x0 given)");
    cfg.initial = PhaseState::cartesian(detail::number_at(doc["x0"], "x0"), detail::number_at(doc["y0"], "y0"));
    detail::check_point(*cfg.initial, "x0");
  }

  if (doc.contains("constants")) {
    const json& c = detail::require_object(doc["constants"], "constants");
    detail::only_keys(c, "constants", {"c1", "c2"});
    if (!c.contains("c1")) throw ConfigError("constants.c1", "missing");
    if (!c.contains("c2")) throw ConfigError("constants.c2", "missing");
    cfg.constants = IntegrationConstants{detail::number_at(c["c1"], "constants.c1"),
                                         detail::number_at(c["c2"], "constants.c2")};
  }

  if (doc.contains("superposition")) {
    const json& s = detail::require_object(doc["superposition"], "superposition");
    detail::only_keys(s, "superposition", {"particulars"});
    if (!s.contains("particulars") || !s["particulars"].is_array()) {
      throw ConfigError("superposition.particulars", "expected an array of states");
    }
    const json& ps = s["particulars"];
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string path = "superposition.particulars[" + std::to_string(i) + "]";
      cfg.particulars.push_back(detail::point_at(ps[i], path));
      detail::check_point(cfg.particulars.back(), path);
    }
  }

  if (doc.contains("convert")) {
    const json& c = detail::require_object(doc["convert"], "convert");
    detail::only_keys(c, "convert", {"input"});
    if (!c.contains("input")) throw ConfigError("convert.input", "missing");
    std::filesystem::path p = detail::string_at(c["input"], "convert.input");
    cfg.convert_input = p.is_absolute() ? p : base_dir / p;
  }

  if (doc.contains("verify")) {
    const json& v = detail::require_object(doc["verify"], "verify");
    detail::only_keys(v, "verify", {"points", "draws"});
    if (v.contains("points")) {
      cfg.verify_points = detail::integer_at(v["points"], "verify.points");
      if (cfg.verify_points < 1) throw ConfigError("verify.points", "must be positive");
    }
    if (v.contains("draws")) {
      cfg.verify_draws = detail::integer_at(v["draws"], "verify.draws");
      if (cfg.verify_draws < 1) throw ConfigError("verify.draws", "must be positive");
    }
  }

  try {
    (void)cfg.spec();
  } catch (const Error& e) {
    throw ConfigError("coefficients", e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace lhsis
