#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lhsis/dynamics.hpp"
#include "lhsis/error.hpp"
#include "lhsis/transform.hpp"

namespace lhsis {

inline constexpr const char* kTrajectoryHeader = "t,x,y,q,p,mean_rho,variance";

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// One trajectory row carrying both charts and the observables.
struct Row {
  double t, x, y, q, p, mean_rho, variance;
};

/// Both charts for a state; throws IntegrationError naming t if the state has
/// no image in the other chart.
inline Row make_row(double t, const PhaseState& s) {
  try {
    const PhaseState c = to_chart(s, ChartId::Cartesian);
    const PhaseState e = to_chart(s, ChartId::Epidemic);
    require_regular_epidemic(e.first, e.second);
    const auto obs = observables(e.first, e.second);
    return {t, c.first, c.second, e.first, e.second, obs.mean_rho, obs.variance};
  } catch (const SingularPointError& err) {
    throw IntegrationError(std::string("state violates chart regularity: ") + err.what(), t);
  }
}

inline std::vector<Row> make_rows(const Trajectory& tr) {
  std::vector<Row> rows;
  rows.reserve(tr.times.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) rows.push_back(make_row(tr.times[i], tr.states[i]));
  return rows;
}

/// Writes the trajectory CSV; extra columns (name, values) are appended.
inline void write_csv(std::ostream& out, const std::vector<Row>& rows, const std::string& extra_name = {},
                      const std::vector<double>& extra = {}) {
  out << kTrajectoryHeader;
  if (!extra_name.empty()) out << ',' << extra_name;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    out << format_double(r.t) << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
        << format_double(r.q) << ',' << format_double(r.p) << ',' << format_double(r.mean_rho) << ','
        << format_double(r.variance);
    if (!extra_name.empty()) out << ',' << format_double(extra.at(i));
    out << '\n';
  }
}

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Append-only list of checks.
class RunReport {
 public:
  void add(Check c) { checks_.push_back(std::move(c)); }

  void add(std::string name, double measured, double tolerance, std::string detail = {}) {
    add(Check{std::move(name), std::isfinite(measured) && measured < tolerance, measured, tolerance,
              std::move(detail)});
  }

  void fail(std::string name, std::string why) { add(Check{std::move(name), false, NAN, 0.0, std::move(why)}); }

  const std::vector<Check>& checks() const { return checks_; }

  bool passed() const {
    for (const auto& c : checks_) {
      if (!c.passed) return false;
    }
    return !checks_.empty();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["passed"] = passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks_) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["status"] = c.passed ? "pass" : "fail";
      if (std::isfinite(c.measured)) {
        e["measured"] = c.measured;
      } else {
        e["measured"] = nullptr;
      }
      e["tolerance"] = c.tolerance;
      if (!c.detail.empty()) e["detail"] = c.detail;
      j["checks"].push_back(std::move(e));
    }
    return j;
  }

 private:
  std::vector<Check> checks_;
};

}  // namespace lhsis
