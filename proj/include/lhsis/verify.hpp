#pragma once

// Numerical invariant checks. Each returns the worst error it measured.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lhsis/algebra.hpp"
#include "lhsis/config.hpp"
#include "lhsis/dynamics.hpp"
#include "lhsis/report.hpp"
#include "lhsis/sampling.hpp"
#include "lhsis/superposition.hpp"
#include "lhsis/transform.hpp"

namespace lhsis::checks {

// Boxes kept away from the poles so that central differences stay accurate.
inline constexpr EpidemicBox kSmoothEpidemic{5.0, 0.1, 5.0, 0.2};
inline constexpr CartesianBox kSmoothCartesian{0.1, 5.0, 5.0, 0.2};

inline PhaseState smooth_point(Rng& rng, ChartId chart) {
  return chart == ChartId::Epidemic ? random_epidemic(rng, kSmoothEpidemic) : random_cartesian(rng, kSmoothCartesian);
}

/// Worst relative round-trip error epi -> cart -> epi over n points of the
/// default sampling box.
inline double round_trip(Rng& rng, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const PhaseState s = random_epidemic(rng);
    const auto c = epi_to_cart(s.first, s.second);
    const auto e = cart_to_epi(c[0], c[1]);
    worst = std::max({worst, scaled_error(e[0], s.first), scaled_error(e[1], s.second)});
  }
  return worst;
}

/// Worst |det J - 1| of the chart change, both directions, on the round-trip box.
inline double jacobian(Rng& rng, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const PhaseState s = random_epidemic(rng);
    worst = std::max(worst, std::abs(jacobian_det(s) - 1.0));
    worst = std::max(worst, std::abs(jacobian_det(to_chart(s, ChartId::Cartesian)) - 1.0));
  }
  return worst;
}

inline double commutators(AlgebraId id, ChartId chart, Rng& rng, int n) {
  double worst = 0.0;
  const auto gens = generators(id);
  for (int k = 0; k < n; ++k) {
    const PhaseState s = smooth_point(rng, chart);
    for (int a : gens) {
      for (int b : gens) {
        const Tangent num = commutator_numeric(id, a, b, s);
        const Tangent ref = commutator_table(id, a, b, s);
        worst = std::max({worst, scaled_error(num[0], ref[0]), scaled_error(num[1], ref[1])});
      }
    }
  }
  return worst;
}

inline double poisson(AlgebraId id, ChartId chart, Rng& rng, int n) {
  double worst = 0.0;
  const auto gens = generators(id);
  for (int k = 0; k < n; ++k) {
    const PhaseState s = smooth_point(rng, chart);
    for (int a : gens) {
      for (int b : gens) {
        worst = std::max(worst, scaled_error(poisson_bracket_numeric(id, a, b, s), poisson_bracket_table(id, a, b, s)));
      }
    }
  }
  return worst;
}

/// grad h_i against (-X_i^2, X_i^1).
inline double contraction(AlgebraId id, ChartId chart, Rng& rng, int n) {
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const PhaseState s = smooth_point(rng, chart);
    for (int i : generators(id)) {
      const auto g = hamiltonian_gradient_numeric(id, i, s);
      const Tangent x = basis_vector_field(id, i, s);
      worst = std::max({worst, scaled_error(g[0], -x[1]), scaled_error(g[1], x[0])});
    }
  }
  return worst;
}

/// |{C, v_i}| on random generator values in [-2,2].
inline double casimir(AlgebraId id, Rng& rng, int n) {
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    GeneratorVector v{};
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < kGeneratorSlots; ++i) worst = std::max(worst, std::abs(casimir_bracket(id, i, v)));
  }
  return worst;
}

/// Constant-rate closed form with mapped constants against the
/// Nakamura-Martinez form, for the three reference parameter sets.
inline double constant_rate(int n) {
  constexpr double sets[3][3] = {{1.0, 1.0, 0.0}, {2.0, 3.0, 5.0}, {0.5, 2.0, 1.0}};
  double worst = 0.0;
  for (const auto& s : sets) {
    const auto c = nm_constants(s[0], s[1], s[2]);
    for (int i = 0; i < n; ++i) {
      const double t = 5.0 * i / (n - 1);
      const auto got = exact_constant_book(s[0], c, t);
      const auto ref = nakamura_martinez(s[0], s[1], s[2], t);
      worst = std::max({worst, scaled_error(got[0], ref[0]), scaled_error(got[1], ref[1])});
    }
  }
  return worst;
}

inline SystemSpec circle_spec() {
  Coefficients k;
  k.b4 = TimeFunction::constant(1.0);
  k.b5 = TimeFunction::constant(-1.0);
  return SystemSpec(AlgebraId::H6, ChartId::Cartesian, k);
}

/// Endpoint error of the rotation x' = y, y' = -x from (1,0) to t = pi/2.
inline double circle(double tol) {
  const auto tr = integrate(circle_spec(), PhaseState::cartesian(1.0, 0.0), 0.0, std::numbers::pi / 2, tol, 2);
  const PhaseState& e = tr.states.back();
  return std::max(std::abs(e.first), std::abs(e.second + 1.0));
}

/// Closed form against the integrator over the given times.
inline double exact_vs_integrator(const SystemSpec& spec, const PhaseState& init, const std::vector<double>& times,
                                  double tol) {
  const auto c = constants_from_initial(spec, init, times.front());
  const auto ex = exact_trajectory(spec, c, times);
  const auto num = integrate_at(spec, init, times.front(), times, tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst = std::max({worst, scaled_error(ex.states[i].first, num.states[i].first),
                      scaled_error(ex.states[i].second, num.states[i].second)});
  }
  return worst;
}

/// Independent copies drawn from [-2,2]^2.
inline ProlongedState random_copies(Rng& rng, std::size_t count) {
  ProlongedState s{ChartId::Cartesian, {}};
  for (std::size_t i = 0; i < count; ++i) s.copies.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
  return s;
}

/// Relative drift of every implemented invariant along a prolonged trajectory
/// integrated in the Cartesian chart.
inline double conservation(const SystemSpec& spec, const ProlongedState& s0, const std::vector<double>& times,
                           double tol) {
  const SystemSpec cart = spec.with_chart(ChartId::Cartesian);
  const auto path = integrate_prolonged(cart, s0, times.front(), times, tol);
  auto invariants = [&](const ProlongedState& s) {
    std::vector<double> out;
    if (spec.algebra() == AlgebraId::H6) {
      for (double v : signed_h6_expressions(s)) out.push_back(v);
      out.push_back(motion_constant(AlgebraId::H6, 3, s));
      out.push_back(motion_constant(AlgebraId::H6, 4, s));
    } else {
      out.push_back(motion_constant(AlgebraId::H4, 2, s));
      out.push_back(motion_constant(AlgebraId::H4, 3, s));
      out.push_back(permuted_constant(AlgebraId::H4, 1, 3, s));
      out.push_back(permuted_constant(AlgebraId::H4, 2, 3, s));
    }
    return out;
  };
  const auto ref = invariants(path.front());
  double worst = 0.0;
  for (const auto& s : path) {
    const auto now = invariants(s);
    for (std::size_t k = 0; k < now.size(); ++k) worst = std::max(worst, scaled_error(now[k], ref[k]));
  }
  return worst;
}

/// Integrates a general solution with its particulars, extracts the constants
/// at the first time and reconstructs the general solution at every time.
/// b2 systems use the oscillator rule.
inline double reconstruction(const SystemSpec& spec, const ProlongedState& s0, const std::vector<double>& times,
                             double tol) {
  const AlgebraId rule = spec.algebra() == AlgebraId::H6 ? AlgebraId::H6 : AlgebraId::H4;
  const SystemSpec cart = spec.with_chart(ChartId::Cartesian);
  const auto path = integrate_prolonged(cart, s0, times.front(), times, tol);
  const auto& first = path.front().copies;
  const std::vector<Pair> parts(first.begin() + 1, first.end());
  const MotionConstants m = extract_constants(rule, first[0], parts);
  Branch branch = Branch::Plus;
  if (rule == AlgebraId::H4) branch = resolve_branch_h4(first[0], first[1], first[2], m.k1, m.k);
  double worst = 0.0;
  for (const auto& s : path) {
    const auto& c = s.copies;
    const Pair r = rule == AlgebraId::H4 ? superpose_h4(c[1], c[2], m.k1, m.k, branch)
                                         : superpose_h6(c[1], c[2], c[3], m.k1, m.k2);
    worst = std::max({worst, scaled_error(r[0], c[0][0]), scaled_error(r[1], c[0][1])});
  }
  return worst;
}

/// Sup-norm residual of x'' - (log b4)' x' + A x - B over interior samples of
/// a Cartesian two-photon trajectory; derivatives by 5-point stencils.
inline double second_order_residual(const SystemSpec& spec, const PhaseState& init, double t0, double t1,
                                    double tol, int samples = 41, double delta = 1e-2) {
  const SystemSpec cart = spec.with_chart(ChartId::Cartesian);
  std::vector<double> times;
  const double inner0 = t0 + 2.0 * delta, inner1 = t1 - 2.0 * delta;
  for (int i = 0; i < samples; ++i) {
    const double tc = inner0 + (inner1 - inner0) * i / (samples - 1);
    for (int k = -2; k <= 2; ++k) times.push_back(tc + k * delta);
  }
  std::vector<double> grid = times;
  grid.insert(grid.begin(), t0);
  const auto tr = integrate_at(cart, init, t0, std::vector<double>(grid.begin() + 1, grid.end()), tol);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const std::size_t o = static_cast<std::size_t>(5 * i);
    const double xm2 = tr.states[o].first, xm1 = tr.states[o + 1].first, x0 = tr.states[o + 2].first;
    const double xp1 = tr.states[o + 3].first, xp2 = tr.states[o + 4].first;
    const double d1 = (xm2 - 8.0 * xm1 + 8.0 * xp1 - xp2) / (12.0 * delta);
    const double d2 = (-xm2 + 16.0 * xm1 - 30.0 * x0 + 16.0 * xp1 - xp2) / (12.0 * delta * delta);
    const auto c = h6_second_order_coeffs(cart, times[o + 2]);
    worst = std::max(worst, std::abs(d2 - c.log_derivative * d1 + c.A * x0 - c.B));
  }
  return worst;
}

}  // namespace lhsis::checks

namespace lhsis {

struct VerifyOptions {
  std::uint64_t seed = 20240607;
  std::optional<double> tol;
};

/// Runs the invariant suite for a configuration. An error raised inside a
/// check is recorded as that check's failure.
inline RunReport run_verify(const RunConfig& cfg, const VerifyOptions& opt = {}) {
  RunReport report;
  Rng rng(opt.seed);
  const double tol = opt.tol.value_or(cfg.tolerance);
  const int n = cfg.verify_points;
  auto guarded = [&](const std::string& name, double limit, auto&& fn) {
    try {
      report.add(name, fn(), limit);
    } catch (const Error& e) {
      report.fail(name, e.what());
    }
  };

  guarded("transform.round_trip", 1e-10, [&] { return checks::round_trip(rng, 100 * n); });
  guarded("transform.jacobian", 1e-8, [&] { return checks::jacobian(rng, 10 * n); });
  for (AlgebraId id : {AlgebraId::B2, AlgebraId::H4, AlgebraId::H6}) {
    for (ChartId chart : {ChartId::Cartesian, ChartId::Epidemic}) {
      const std::string tag = std::string(to_string(id)) + "." + to_string(chart);
      guarded("algebra.commutators." + tag, 1e-5, [&] { return checks::commutators(id, chart, rng, n); });
      guarded("algebra.poisson." + tag, 1e-5, [&] { return checks::poisson(id, chart, rng, n); });
      guarded("algebra.contraction." + tag, 1e-5, [&] { return checks::contraction(id, chart, rng, n); });
    }
  }
  for (AlgebraId id : {AlgebraId::H4, AlgebraId::H6}) {
    guarded(std::string("algebra.casimir.") + to_string(id), 1e-12, [&] { return checks::casimir(id, rng, 100); });
  }
  guarded("dynamics.constant_rate", 1e-10, [&] { return checks::constant_rate(100); });
  guarded("dynamics.circle", 1e-6, [&] { return checks::circle(tol); });

  const SystemSpec spec = cfg.spec();
  const auto times = cfg.times();
  if (cfg.algebra != AlgebraId::H6 && cfg.initial) {
    guarded("dynamics.exact_vs_integrator", 1e-6,
            [&] { return checks::exact_vs_integrator(spec, *cfg.initial, times, tol); });
  }
  const std::size_t copies = cfg.algebra == AlgebraId::H6 ? 4 : 3;
  for (int d = 0; d < cfg.verify_draws; ++d) {
    const std::string tag = std::to_string(d);
    const ProlongedState s0 = checks::random_copies(rng, copies);
    guarded("superposition.conservation." + tag, 1e-6, [&] { return checks::conservation(spec, s0, times, tol); });
    guarded("superposition.reconstruction." + tag, 1e-5,
            [&] { return checks::reconstruction(spec, s0, times, tol); });
  }
  if (cfg.initial && cfg.particulars.size() + 1 == copies) {
    ProlongedState s0{ChartId::Cartesian, {}};
    s0.copies.push_back(to_chart(*cfg.initial, ChartId::Cartesian).coords());
    for (const auto& p : cfg.particulars) s0.copies.push_back(to_chart(p, ChartId::Cartesian).coords());
    guarded("superposition.configured", 1e-5, [&] { return checks::reconstruction(spec, s0, times, tol); });
  }
  if (cfg.algebra == AlgebraId::H6 && !cfg.coefficients.b4.is_zero()) {
    const PhaseState init =
        cfg.initial ? to_chart(*cfg.initial, ChartId::Cartesian) : PhaseState::cartesian(1.0, 0.0);
    guarded("dynamics.second_order_residual", 1e-5, [&] {
      return checks::second_order_residual(spec, init, cfg.t0, cfg.t1, std::min(tol, 1e-12));
    });
  }
  return report;
}

}  // namespace lhsis
