// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lhsis/lhsis.hpp"
#include "lhsis/sampling.hpp"
#include "oracles.hpp"

using namespace lhsis;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string summary;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.passed) ++failures;
  std::printf("%s criterion %2d  %-34s %s  [%.2fs]\n", r.passed ? "PASS" : "FAIL", id, title, r.summary.c_str(), secs);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

double pair_error(const Pair& a, const Pair& b) {
  return std::max(oracle::scaled(a[0], b[0]), oracle::scaled(a[1], b[1]));
}

double state_error(const PhaseState& a, const Pair& b) { return pair_error({a.first, a.second}, b); }

Coefficients expressions(const char* rho0, const char* b1, const char* b2, const char* b4 = "0",
                         const char* b5 = "0") {
  return {parse_expression(rho0), parse_expression(b1), parse_expression(b2), parse_expression(b4),
          parse_expression(b5)};
}

// Fixed-step reference states of the Cartesian system at t = k*dt, k = 0..n.
std::vector<std::vector<double>> reference_path(const oracle::Coeffs& c, std::vector<double> y, double dt, int n,
                                                int steps_per_sample) {
  const auto sys = oracle::cartesian_system(c);
  std::vector<std::vector<double>> out{y};
  for (int k = 0; k < n; ++k) {
    y = oracle::rk4(sys, k * dt, y, (k + 1) * dt, steps_per_sample);
    out.push_back(y);
  }
  return out;
}

PhaseState fd_point(Rng& rng, ChartId chart) {
  return chart == ChartId::Epidemic ? random_epidemic(rng, {5.0, 0.1, 5.0, 0.2})
                                    : random_cartesian(rng, {0.1, 5.0, 5.0, 0.2});
}

Outcome canonical_transformation() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double round_trip = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    const auto s = random_epidemic(rng);
    const auto c = epi_to_cart(s.first, s.second);
    const auto e = cart_to_epi(c[0], c[1]);
    round_trip = std::max({round_trip, std::abs(e[0] - s.first) / std::abs(s.first),
                           std::abs(e[1] - s.second) / std::abs(s.second)});
  }
  double jac = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto s = random_epidemic(rng);
    jac = std::max(jac, std::abs(jacobian_det(s) - 1.0));
    jac = std::max(jac, std::abs(jacobian_det(to_chart(s, ChartId::Cartesian)) - 1.0));
  }
  const double secs = elapsed(start);
  return {round_trip < 1e-10 && jac < 1e-8 && secs < 30.0,
          "round trip " + sci(round_trip) + " (<1e-10), |det J - 1| " + sci(jac) + " (<1e-8), " + sci(secs) +
              "s (<30s)"};
}

Outcome algebraic_tables() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(102);
  double worst_comm = 0.0, worst_poisson = 0.0;
  for (auto [id, order] : {std::pair{AlgebraId::B2, 2}, {AlgebraId::H4, 4}, {AlgebraId::H6, 6}}) {
    const auto gens = oracle::generators(order);
    for (auto chart : {ChartId::Cartesian, ChartId::Epidemic}) {
      for (int k = 0; k < 200; ++k) {
        const auto s = fd_point(rng, chart);
        const auto c = to_chart(s, ChartId::Cartesian);
        for (int a : gens) {
          for (int b : gens) {
            oracle::Vec2 ref{0.0, 0.0};
            double pref = 0.0;
            for (auto t : oracle::commutator(a, b)) {
              const auto x = chart == ChartId::Cartesian ? oracle::cartesian_field(t.gen, s.first, s.second)
                                                         : oracle::epidemic_field(t.gen, s.first, s.second);
              ref[0] += t.coef * x[0];
              ref[1] += t.coef * x[1];
            }
            for (auto t : oracle::poisson(a, b)) pref += t.coef * oracle::cartesian_hamiltonian(t.gen, c.first, c.second);
            const auto num = commutator_numeric(id, a, b, s);
            worst_comm = std::max({worst_comm, oracle::scaled(num[0], ref[0]), oracle::scaled(num[1], ref[1])});
            worst_poisson = std::max(worst_poisson, oracle::scaled(poisson_bracket_numeric(id, a, b, s), pref));
          }
        }
      }
    }
  }
  const double secs = elapsed(start);
  return {worst_comm < 1e-5 && worst_poisson < 1e-5 && secs < 60.0,
          "commutators " + sci(worst_comm) + ", Poisson " + sci(worst_poisson) + " (<1e-5), " + sci(secs) +
              "s (<60s)"};
}

Outcome book_exact_solution() {
  const SystemSpec cart(AlgebraId::B2, ChartId::Cartesian, expressions("1 + 0.5*sin(t)", "0", "cos(t)"));
  const SystemSpec epi = cart.with_chart(ChartId::Epidemic);
  const IntegrationConstants c{0.1, 200.0};
  Rng rng(103);
  double residual = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = rng.uniform(0.05, 4.95), h = 1e-5;
    auto check = [&](const SystemSpec& spec, auto&& solution) {
      const PhaseState p = solution(spec, c, t + h), m = solution(spec, c, t - h);
      const auto d = rhs(spec, t, solution(spec, c, t));
      residual = std::max({residual, oracle::scaled((p.first - m.first) / (2 * h), d[0]),
                           oracle::scaled((p.second - m.second) / (2 * h), d[1])});
    };
    check(cart, [](const SystemSpec& s, const IntegrationConstants& k, double u) { return exact_book(s, k, u); });
    check(epi, [](const SystemSpec& s, const IntegrationConstants& k, double u) { return exact_book(s, k, u); });
    check(epi,
          [](const SystemSpec& s, const IntegrationConstants& k, double u) { return exact_book_direct(s, k, u); });
  }
  const oracle::Coeffs oc{[](double t) { return 1 + 0.5 * std::sin(t); }, [](double) { return 0.0; },
                          [](double t) { return std::cos(t); }, [](double) { return 0.0; },
                          [](double) { return 0.0; }};
  const auto path = reference_path(oc, {0.1, 200.0}, 0.05, 100, 100);
  double agreement = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double t = 0.05 * static_cast<double>(k);
    const Pair ref{path[k][0], path[k][1]};
    agreement = std::max(agreement, state_error(exact_book(cart, c, t), ref));
    agreement = std::max(agreement, state_error(exact_book(epi, c, t), oracle::cart_to_epi(ref[0], ref[1])));
    agreement = std::max(agreement, state_error(exact_book_direct(epi, c, t), oracle::cart_to_epi(ref[0], ref[1])));
  }
  return {residual < 1e-6 && agreement < 1e-6,
          "residual " + sci(residual) + " (<1e-6), reference agreement " + sci(agreement) + " (<1e-6)"};
}

Outcome constant_rate() {
  double worst = 0.0;
  for (auto [rho, tc1, tc2] : {std::tuple{1.0, 1.0, 0.0}, {2.0, 3.0, 5.0}, {0.5, 2.0, 1.0}}) {
    const auto c = nm_constants(rho, tc1, tc2);
    for (int i = 0; i < 100; ++i) {
      const double t = 0.05 * i;
      const auto a = exact_constant_book(rho, c, t);
      const auto r = oracle::nakamura_martinez(rho, tc1, tc2, t);
      worst = std::max({worst, oracle::scaled(a[0], r[0]), oracle::scaled(a[1], r[1])});
    }
  }
  return {worst < 1e-10, "max error " + sci(worst) + " (<1e-10)"};
}

Outcome oscillator_exact_solution() {
  const SystemSpec cart(AlgebraId::H4, ChartId::Cartesian, expressions("1 + 0.5*sin(t)", "cos(t)", "1"));
  const SystemSpec epi = cart.with_chart(ChartId::Epidemic);
  const IntegrationConstants c{0.1, 200.0};
  const oracle::Coeffs oc{[](double t) { return 1 + 0.5 * std::sin(t); }, [](double t) { return std::cos(t); },
                          [](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  const auto path = reference_path(oc, {0.1, 200.0}, 0.05, 100, 100);
  double agreement = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double t = 0.05 * static_cast<double>(k);
    const Pair ref{path[k][0], path[k][1]};
    agreement = std::max(agreement, state_error(exact_oscillator(cart, c, t), ref));
    agreement = std::max(agreement, state_error(exact_oscillator(epi, c, t), oracle::cart_to_epi(ref[0], ref[1])));
  }
  const SystemSpec h4(AlgebraId::H4, ChartId::Epidemic, expressions("1 + 0.5*sin(t)", "0", "cos(t)"));
  const SystemSpec b2(AlgebraId::B2, ChartId::Epidemic, expressions("1 + 0.5*sin(t)", "0", "cos(t)"));
  double reduction = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.05 * k;
    for (auto chart : {ChartId::Cartesian, ChartId::Epidemic}) {
      const auto a = exact_oscillator(h4.with_chart(chart), c, t);
      const auto b = exact_book(b2.with_chart(chart), c, t);
      reduction = std::max(reduction, state_error(a, {b.first, b.second}));
    }
  }
  return {agreement < 1e-6 && reduction < 1e-14,
          "reference agreement " + sci(agreement) + " (<1e-6), b1=0 vs book " + sci(reduction) + " (<1e-14)"};
}

struct RandomSystem {
  oracle::Coeffs oracle;
  Coefficients library;
};

RandomSystem random_system(Rng& rng, bool two_photon) {
  const double r0 = rng.uniform(-0.4, 0.4), r1 = rng.uniform(-0.3, 0.3), w = rng.uniform(0.5, 2.0);
  const double a1 = rng.uniform(-1, 1), a2 = rng.uniform(0.3, 1.0) * rng.sign();
  const double a4 = two_photon ? rng.uniform(0.2, 0.6) * rng.sign() : 0.0;
  const double a5 = two_photon ? rng.uniform(0.2, 0.6) * rng.sign() : 0.0;
  RandomSystem s;
  s.oracle = {[=](double t) { return r0 + r1 * std::sin(w * t); }, [=](double t) { return a1 * std::cos(t); },
              [=](double t) { return a2 * (1.0 + 0.3 * std::sin(2 * t)); }, [=](double) { return a4; },
              [=](double t) { return a5 * std::exp(-0.2 * t); }};
  auto num = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << "(" << v << ")";
    return o.str();
  };
  s.library = {parse_expression(num(r0) + "+" + num(r1) + "*sin(" + num(w) + "*t)"),
               parse_expression(num(a1) + "*cos(t)"), parse_expression(num(a2) + "*(1+0.3*sin(2*t))"),
               parse_expression(num(a4)),
               two_photon ? parse_expression(num(a5) + "*exp(-0.2*t)") : TimeFunction::constant(0.0)};
  return s;
}

Outcome conservation() {
  Rng rng(106);
  double worst = 0.0;
  for (int draw = 0; draw < 3; ++draw) {
    for (bool h6 : {false, true}) {
      const auto sys = random_system(rng, h6);
      const int copies = h6 ? 4 : 3;
      std::vector<double> y;
      for (int i = 0; i < 2 * copies; ++i) y.push_back(rng.uniform(-2, 2));
      const auto path = reference_path(sys.oracle, y, 0.1, 50, 100);
      const SystemSpec spec(h6 ? AlgebraId::H6 : AlgebraId::H4, ChartId::Cartesian, sys.library);
      ProlongedState s0{ChartId::Cartesian, {}};
      for (int i = 0; i < copies; ++i) s0.copies.push_back({y[2 * i], y[2 * i + 1]});
      const auto lib = integrate_prolonged(spec, s0, 0.0, linspace(0.0, 5.0, 51), 1e-12);
      auto values = [&](const ProlongedState& s) {
        if (!h6) return std::vector<double>{motion_constant(AlgebraId::H4, 2, s), motion_constant(AlgebraId::H4, 3, s)};
        const auto e = signed_h6_expressions(s);
        return std::vector<double>(e.begin(), e.end());
      };
      const auto f0 = values(s0);
      for (std::size_t k = 0; k < path.size(); ++k) {
        ProlongedState s{ChartId::Cartesian, {}};
        for (int i = 0; i < copies; ++i) s.copies.push_back({path[k][2 * i], path[k][2 * i + 1]});
        const auto a = values(s), b = values(lib[k]);
        for (std::size_t i = 0; i < f0.size(); ++i) {
          const double norm = std::max(1.0, std::abs(f0[i]));
          worst = std::max({worst, std::abs(a[i] - f0[i]) / norm, std::abs(b[i] - f0[i]) / norm});
        }
      }
    }
  }
  return {worst < 1e-6, "max relative drift " + sci(worst) + " (<1e-6)"};
}

bool near_pole(const std::vector<double>& y) {
  for (std::size_t i = 0; i + 1 < y.size(); i += 2) {
    if (std::abs(y[i]) < 0.05 || std::abs(std::abs(y[i] * y[i + 1]) - 1.0) < 0.05) return true;
  }
  return false;
}

Outcome reconstruction() {
  Rng rng(107);
  double worst = 0.0;
  std::string tally;
  bool complete = true;
  for (bool h6 : {false, true}) {
    for (auto chart : {ChartId::Cartesian, ChartId::Epidemic}) {
      int done = 0, attempts = 0;
      while (done < 20 && attempts++ < 1000) {
        const auto sys = random_system(rng, h6);
        const int copies = h6 ? 4 : 3;
        // Epidemic draws start in the quadrant x, y > 0 with xy >= 4 so the
        // trajectories stay clear of the chart's poles more often.
        std::vector<double> y;
        for (int i = 0; i < 2 * copies; ++i) y.push_back(chart == ChartId::Epidemic ? rng.uniform(2, 4) : rng.uniform(-2, 2));
        const auto path = reference_path(sys.oracle, y, 0.1, 50, 100);
        if (chart == ChartId::Epidemic) {
          bool regular = true;
          for (const auto& s : path) regular = regular && !near_pole(s);
          if (!regular) continue;
        }
        auto copy = [&](std::size_t k, int i) {
          const Pair c{path[k][2 * i], path[k][2 * i + 1]};
          return chart == ChartId::Cartesian ? c : oracle::cart_to_epi(c[0], c[1]);
        };
        std::vector<Pair> parts;
        for (int i = 1; i < copies; ++i) parts.push_back(copy(0, i));
        const auto m = extract_constants(h6 ? AlgebraId::H6 : AlgebraId::H4, copy(0, 0), parts, chart);
        if (!m.usable) continue;
        if (h6 && std::abs(m.k4) < 0.1) continue;
        if (!h6) {
          const Pair a{path[0][2], path[0][3]}, b{path[0][4], path[0][5]};
          if (std::abs(a[0] - b[0]) < 0.1 || std::abs(a[1] - b[1]) < 0.1) continue;
        }
        const Branch branch = h6 ? Branch::Plus : resolve_branch_h4(copy(0, 0), parts[0], parts[1], m.k1, m.k, chart);
        for (std::size_t k = 0; k < path.size(); ++k) {
          const Pair out = h6 ? superpose_h6(copy(k, 1), copy(k, 2), copy(k, 3), m.k1, m.k2, chart)
                              : superpose_h4(copy(k, 1), copy(k, 2), m.k1, m.k, branch, chart);
          worst = std::max(worst, pair_error(out, copy(k, 0)));
        }
        ++done;
      }
      complete = complete && done == 20;
      tally += std::string(tally.empty() ? "" : ", ") + (h6 ? "h6 " : "h4 ") + to_string(chart) + " " +
               std::to_string(done);
    }
  }
  return {complete && worst < 1e-5, "max pointwise error " + sci(worst) + " (<1e-5); draws: " + tally};
}

Outcome coincidences() {
  Rng rng(108);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    for (auto chart : {ChartId::Cartesian, ChartId::Epidemic}) {
      std::array<Pair, 3> s;
      std::array<Pair, 3> x;
      for (int i = 0; i < 3; ++i) {
        const auto p = fd_point(rng, chart);
        s[i] = {p.first, p.second};
        const auto c = to_chart(p, ChartId::Cartesian);
        x[i] = {c.first, c.second};
      }
      const double k4 = x[0][0] * (x[1][1] - x[2][1]) + x[1][0] * (x[2][1] - x[0][1]) + x[2][0] * (x[0][1] - x[1][1]);
      const double k3 = (x[1][0] - x[0][0]) * (x[1][1] - x[0][1]);
      if (std::abs(k4) < 1e-3 || x[0][0] == x[1][0] || x[0][1] == x[1][1]) continue;
      worst = std::max(worst, pair_error(superpose_h6(s[0], s[1], s[2], 0.0, 0.0, chart), s[0]));
      worst = std::max(worst, pair_error(superpose_h6(s[0], s[1], s[2], 0.0, -k4, chart), s[1]));
      worst = std::max(worst, pair_error(superpose_h6(s[0], s[1], s[2], k4, 0.0, chart), s[2]));
      for (auto b : {Branch::Plus, Branch::Minus}) {
        worst = std::max(worst, pair_error(superpose_h4(s[0], s[1], 0.0, 2 * k3, b, chart), s[0]));
        worst = std::max(worst, pair_error(superpose_h4(s[0], s[1], k3, 2 * k3, b, chart), s[1]));
      }
    }
  }
  return {worst < 1e-12, "max error " + sci(worst) + " (<1e-12)"};
}

Outcome second_order_reduction() {
  const SystemSpec spec(AlgebraId::H6, ChartId::Cartesian,
                        expressions("0.3*sin(t)", "0.2*cos(2*t)", "1+0.1*t", "1+0.5*sin(t)", "-0.8"));
  auto A = [](double t) {
    const double r = 0.3 * std::sin(t), dr = 0.3 * std::cos(t), b4 = 1 + 0.5 * std::sin(t);
    const double l = 0.5 * std::cos(t) / b4;
    return r * l - r * r - b4 * (-0.8) - dr;
  };
  auto B = [](double t) {
    const double r = 0.3 * std::sin(t), b1 = 0.2 * std::cos(2 * t), db1 = -0.4 * std::sin(2 * t);
    const double b2 = 1 + 0.1 * t, b4 = 1 + 0.5 * std::sin(t), l = 0.5 * std::cos(t) / b4;
    return -b1 * l + r * b1 + b2 * b4 + db1;
  };
  auto L = [](double t) { return 0.5 * std::cos(t) / (1 + 0.5 * std::sin(t)); };
  const double delta = 1e-2;
  std::vector<double> times;
  for (int i = 0; i <= 100; ++i) {
    const double tc = 0.05 + 4.9 * i / 100.0;
    for (int k = -2; k <= 2; ++k) times.push_back(tc + k * delta);
  }
  const auto tr = integrate_at(spec, PhaseState::cartesian(0.5, -0.3), 0.0, times, 1e-12);
  double residual = 0.0;
  for (std::size_t i = 0; i + 4 < times.size(); i += 5) {
    const double xm2 = tr.states[i].first, xm1 = tr.states[i + 1].first, x0 = tr.states[i + 2].first;
    const double xp1 = tr.states[i + 3].first, xp2 = tr.states[i + 4].first;
    const double d1 = (xm2 - 8 * xm1 + 8 * xp1 - xp2) / (12 * delta);
    const double d2 = (-xm2 + 16 * xm1 - 30 * x0 + 16 * xp1 - xp2) / (12 * delta * delta);
    const double t = times[i + 2];
    residual = std::max(residual, std::abs(d2 - L(t) * d1 + A(t) * x0 - B(t)));
  }
  const SystemSpec circle(AlgebraId::H6, ChartId::Cartesian, expressions("0", "0", "0", "1", "-1"));
  const auto end = integrate(circle, PhaseState::cartesian(1.0, 0.0), 0.0, std::numbers::pi / 2, 1e-10, 2);
  const double circle_err = std::max(std::abs(end.states.back().first), std::abs(end.states.back().second + 1.0));
  return {residual < 1e-5 && circle_err < 1e-6,
          "residual " + sci(residual) + " (<1e-5), circle endpoint " + sci(circle_err) + " (<1e-6)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "lhsis_acceptance_cli";
  fs::remove_all(root);
  int status[2];
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    fs::create_directories(dir);
    const std::string cmd = std::string("\"") + LHSIS_CLI_PATH + "\" verify --config \"" + LHSIS_DEFAULT_CONFIG +
                            "\" --out \"" + dir.string() + "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    status[run] = rc == -1 ? -1 : WEXITSTATUS(rc);
    outputs[run] = slurp(dir / "verify_report.json") + "\n--\n" + slurp(dir / "stdout.txt");
  }
  fs::remove_all(root);
  const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
  return {status[0] == 0 && status[1] == 0 && same,
          "exit codes " + std::to_string(status[0]) + "," + std::to_string(status[1]) +
              (same ? ", outputs byte-identical" : ", outputs differ")};
}

}  // namespace

int main() {
  report(1, "canonical transformation", canonical_transformation);
  report(2, "algebraic tables", algebraic_tables);
  report(3, "book exact solution", book_exact_solution);
  report(4, "constant-rate regression", constant_rate);
  report(5, "oscillator exact solution", oscillator_exact_solution);
  report(6, "conservation", conservation);
  report(7, "superposition reconstruction", reconstruction);
  report(8, "coincidence identities", coincidences);
  report(9, "second-order reduction", second_order_reduction);
  report(10, "CLI determinism", cli_determinism);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
