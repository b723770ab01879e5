#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lhsis/config.hpp"
#include "lhsis/dynamics.hpp"
#include "lhsis/report.hpp"
#include "lhsis/superposition.hpp"
#include "lhsis/verify.hpp"

namespace lhsis::cli {

using ordered_json = nlohmann::ordered_json;

struct Options {
  std::filesystem::path out_dir = ".";
  bool cross_check = false;
  std::uint64_t seed = VerifyOptions{}.seed;
  std::optional<double> tol;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"simulate", "exact", "superpose", "constants", "verify", "convert"};
  return names;
}

namespace detail {

inline std::ofstream open_output(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  const auto path = opt.out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

inline void write_json(const Options& opt, const std::string& name, const ordered_json& j) {
  auto out = open_output(opt, name);
  out << j.dump(2) << '\n';
}

inline const PhaseState& require_initial(const RunConfig& cfg, const char* command) {
  if (!cfg.initial) throw ConfigError("q0", std::string(command) + " needs an initial state (q0/p0 or x0/y0)");
  return *cfg.initial;
}

inline AlgebraId rule_of(AlgebraId id) { return id == AlgebraId::H6 ? AlgebraId::H6 : AlgebraId::H4; }

/// General solution first, then the particulars, all in the config chart.
inline ProlongedState configured_copies(const RunConfig& cfg, const char* command) {
  const PhaseState& g = require_initial(cfg, command);
  const std::size_t need = rule_of(cfg.algebra) == AlgebraId::H6 ? 3 : 2;
  if (cfg.particulars.size() != need) {
    throw ConfigError("superposition.particulars", std::string(command) + " on " + to_string(cfg.algebra) +
                                                       " needs " + std::to_string(need) + " particular solutions");
  }
  ProlongedState s{cfg.chart, {}};
  s.copies.push_back(to_chart(g, cfg.chart).coords());
  for (const auto& p : cfg.particulars) s.copies.push_back(to_chart(p, cfg.chart).coords());
  return s;
}

inline double state_error(const PhaseState& a, const PhaseState& b) {
  return std::max(scaled_error(a.first, b.first), scaled_error(a.second, b.second));
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(where + ": not a number: '" + s + "'");
  return v;
}

}  // namespace detail

inline int run_simulate(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const auto tr = integrate_at(cfg.spec(), detail::require_initial(cfg, "simulate"), cfg.t0, cfg.times(),
                               opt.tol.value_or(cfg.tolerance));
  auto out = detail::open_output(opt, "simulate.csv");
  write_csv(out, make_rows(tr));
  log << "simulate: wrote " << tr.times.size() << " samples to " << (opt.out_dir / "simulate.csv").string() << '\n';
  return 0;
}

inline int run_exact(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  if (cfg.algebra == AlgebraId::H6) {
    throw DomainError("exact: only the b2 and h4 systems admit closed-form solutions; use simulate for h6");
  }
  const SystemSpec spec = cfg.spec();
  IntegrationConstants c;
  if (cfg.constants) {
    c = *cfg.constants;
  } else {
    c = constants_from_initial(spec, detail::require_initial(cfg, "exact"), cfg.t0);
  }
  const auto times = cfg.times();
  const auto tr = exact_trajectory(spec, c, times);
  auto out = detail::open_output(opt, "exact.csv");
  write_csv(out, make_rows(tr));
  log << "exact: wrote " << times.size() << " samples to " << (opt.out_dir / "exact.csv").string() << '\n';
  if (opt.cross_check) {
    const double tol = opt.tol.value_or(cfg.tolerance);
    const auto num = integrate_at(spec, tr.states.front(), cfg.t0, times, tol);
    double worst = 0.0, worst_t = cfg.t0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double e = detail::state_error(tr.states[i], num.states[i]);
      if (e > worst) {
        worst = e;
        worst_t = times[i];
      }
    }
    ordered_json j;
    j["max_deviation"] = worst;
    j["at_time"] = worst_t;
    j["integrator_tolerance"] = tol;
    j["samples"] = times.size();
    detail::write_json(opt, "exact_cross_check.json", j);
    log << "exact: max deviation vs integrator " << format_double(worst) << " at t=" << format_double(worst_t)
        << '\n';
  }
  return 0;
}

inline int run_superpose(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const AlgebraId rule = detail::rule_of(cfg.algebra);
  const ProlongedState s0 = detail::configured_copies(cfg, "superpose");
  const auto times = cfg.times();
  const auto path = integrate_prolonged(cfg.spec(), s0, cfg.t0, times, opt.tol.value_or(cfg.tolerance));
  const auto& first = path.front().copies;
  const std::vector<Pair> parts(first.begin() + 1, first.end());
  const MotionConstants m = extract_constants(rule, first[0], parts, cfg.chart);
  if (!m.usable) throw DomainError("superpose: the particular solutions are degenerate at t0");
  Branch branch = Branch::Plus;
  if (rule == AlgebraId::H4) branch = resolve_branch_h4(first[0], first[1], first[2], m.k1, m.k, cfg.chart);

  std::vector<Row> rows;
  std::vector<double> err;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& c = path[i].copies;
    Pair r;
    try {
      r = rule == AlgebraId::H4 ? superpose_h4(c[1], c[2], m.k1, m.k, branch, cfg.chart)
                                : superpose_h6(c[1], c[2], c[3], m.k1, m.k2, cfg.chart);
    } catch (const Error& e) {
      throw IntegrationError(std::string("superpose: ") + e.what(), times[i]);
    }
    const PhaseState rec{cfg.chart, r[0], r[1]};
    rows.push_back(make_row(times[i], rec));
    err.push_back(detail::state_error(rec, PhaseState{cfg.chart, c[0][0], c[0][1]}));
  }
  auto out = detail::open_output(opt, "superpose.csv");
  write_csv(out, rows, "reconstruction_error", err);
  double worst = 0.0;
  for (double e : err) worst = std::max(worst, e);
  log << "superpose: " << to_string(rule) << " rule";
  if (rule == AlgebraId::H4) log << ", branch " << to_string(branch);
  log << ", max reconstruction error " << format_double(worst) << '\n';
  return 0;
}

inline int run_constants(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const AlgebraId rule = detail::rule_of(cfg.algebra);
  const ProlongedState s0 = detail::configured_copies(cfg, "constants");
  const auto times = cfg.times();
  const auto path = integrate_prolonged(cfg.spec(), s0, cfg.t0, times, opt.tol.value_or(cfg.tolerance));

  std::vector<std::string> names;
  auto values = [&](const ProlongedState& s) {
    std::vector<double> v;
    if (rule == AlgebraId::H4) {
      v = {motion_constant(rule, 2, s), motion_constant(rule, 3, s), permuted_constant(rule, 1, 3, s),
           permuted_constant(rule, 2, 3, s)};
    } else {
      const auto e = signed_h6_expressions(s);
      v = {e[0], e[1], e[2], e[3], motion_constant(rule, 3, s), motion_constant(rule, 4, s)};
    }
    return v;
  };
  if (rule == AlgebraId::H4) {
    names = {"F2", "F3", "F2_13", "F2_23"};
  } else {
    names = {"S123", "S124", "S134", "S234", "F3", "F4"};
  }

  const auto& first = path.front().copies;
  const MotionConstants m = extract_constants(rule, first[0], std::vector<Pair>(first.begin() + 1, first.end()),
                                              cfg.chart);
  ordered_json j;
  j["algebra"] = to_string(cfg.algebra);
  j["rule"] = to_string(rule);
  j["chart"] = to_string(cfg.chart);
  ordered_json sig;
  sig["k1"] = m.k1;
  if (rule == AlgebraId::H4) {
    sig["k"] = m.k;
    sig["k2"] = m.k2;
    sig["k3"] = m.k3;
    if (std::isfinite(m.B)) {
      sig["B"] = m.B;
    } else {
      sig["B"] = nullptr;
    }
  } else {
    sig["k2"] = m.k2;
    sig["k4"] = m.k4;
  }
  sig["usable"] = m.usable;
  j["significant_constants"] = sig;

  const auto ref = values(path.front());
  std::vector<double> drift(names.size(), 0.0);
  ordered_json samples = ordered_json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto v = values(path[i]);
    ordered_json row;
    row["t"] = times[i];
    for (std::size_t k = 0; k < names.size(); ++k) {
      row[names[k]] = v[k];
      drift[k] = std::max(drift[k], scaled_error(v[k], ref[k]));
    }
    samples.push_back(std::move(row));
  }
  ordered_json d;
  double worst = 0.0;
  for (std::size_t k = 0; k < names.size(); ++k) {
    d[names[k]] = drift[k];
    worst = std::max(worst, drift[k]);
  }
  j["drift"] = d;
  j["max_drift"] = worst;
  j["samples"] = samples;
  detail::write_json(opt, "constants.json", j);
  log << "constants: max relative drift " << format_double(worst) << '\n';
  return 0;
}

inline int run_verify_command(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  const RunReport report = run_verify(cfg, VerifyOptions{opt.seed, opt.tol});
  ordered_json j;
  j["seed"] = opt.seed;
  const auto body = report.to_json();
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  detail::write_json(opt, "verify_report.json", j);
  for (const auto& c : report.checks()) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << format_double(c.measured)
        << " tol=" << format_double(c.tolerance);
    if (!c.detail.empty()) log << "  (" << c.detail << ")";
    log << '\n';
  }
  log << "verify: " << (report.passed() ? "all checks passed" : "FAILED") << '\n';
  return report.passed() ? 0 : 1;
}

inline int run_convert(const RunConfig& cfg, const Options& opt, std::ostream& log) {
  if (!cfg.convert_input) throw ConfigError("convert.input", "missing");
  const std::string src = cfg.convert_input->string();
  std::ifstream in(*cfg.convert_input);
  if (!in) throw Error("cannot open " + src);
  std::string line;
  if (!std::getline(in, line)) throw Error(src + ": empty file");
  const auto header = detail::split(line);
  auto column = [&](const char* name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto ct = column("t");
  const auto cx = column("x"), cy = column("y"), cq = column("q"), cp = column("p");
  const bool have_cart = cx && cy, have_epi = cq && cp;
  if (!ct || (!have_cart && !have_epi)) throw Error(src + ": header must contain t and either x,y or q,p");
  const bool from_cart = have_cart && (!have_epi || cfg.chart == ChartId::Cartesian);
  const std::size_t c1 = from_cart ? *cx : *cq, c2 = from_cart ? *cy : *cp;

  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split(line);
    const std::string where = src + ":" + std::to_string(lineno);
    if (f.size() < header.size()) throw Error(where + ": expected " + std::to_string(header.size()) + " fields");
    const double t = detail::parse_number(f[*ct], where);
    const double a = detail::parse_number(f[c1], where), b = detail::parse_number(f[c2], where);
    rows.push_back(make_row(t, from_cart ? PhaseState::cartesian(a, b) : PhaseState::epidemic(a, b)));
  }
  auto out = detail::open_output(opt, "converted.csv");
  write_csv(out, rows);
  log << "convert: " << rows.size() << " rows from the " << (from_cart ? "cartesian" : "epidemic") << " chart\n";
  return 0;
}

/// Runs one subcommand. Returns the process exit status; errors propagate.
inline int dispatch(const std::string& command, const RunConfig& cfg, const Options& opt,
                    std::ostream& log = std::cout) {
  if (command == "simulate") return run_simulate(cfg, opt, log);
  if (command == "exact") return run_exact(cfg, opt, log);
  if (command == "superpose") return run_superpose(cfg, opt, log);
  if (command == "constants") return run_constants(cfg, opt, log);
  if (command == "verify") return run_verify_command(cfg, opt, log);
  if (command == "convert") return run_convert(cfg, opt, log);
  throw DomainError("unknown command '" + command + "'");
}

}  // namespace lhsis::cli
