#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lhsis/algebra.hpp"
#include "lhsis/coeffs.hpp"
#include "lhsis/error.hpp"
#include "lhsis/ode.hpp"
#include "lhsis/transform.hpp"

namespace lhsis {

/// rho0 multiplies X3, b2 (the book "b") X2, and b1, b4, b5 the generators of
/// the same index.
struct Coefficients {
  TimeFunction rho0;
  TimeFunction b1;
  TimeFunction b2;
  TimeFunction b4;
  TimeFunction b5;

  const TimeFunction& of_generator(int i) const {
    switch (i) {
      case 1: return b1;
      case 2: return b2;
      case 3: return rho0;
      case 4: return b4;
      case 5: return b5;
    }
    throw DomainError("no coefficient for generator " + std::to_string(i));
  }
};

class SystemSpec {
 public:
  SystemSpec(AlgebraId algebra, ChartId chart, Coefficients coefficients, double a = 0.0,
             QuadratureConfig quadrature = {})
      : algebra_(algebra), chart_(chart), coeffs_(std::move(coefficients)), a_(a), quad_(quadrature) {
    quad_.validate();
    if (!std::isfinite(a_)) throw DomainError("lower limit a must be finite");
    auto forbid = [&](const TimeFunction& f, const char* name) {
      if (!f.is_zero()) {
        throw DomainError(std::string("coefficient ") + name + " must vanish for algebra " + to_string(algebra_));
      }
    };
    if (algebra_ == AlgebraId::B2) forbid(coeffs_.b1, "b1");
    if (algebra_ != AlgebraId::H6) {
      forbid(coeffs_.b4, "b4");
      forbid(coeffs_.b5, "b5");
    }
  }

  AlgebraId algebra() const { return algebra_; }
  ChartId chart() const { return chart_; }
  const Coefficients& coefficients() const { return coeffs_; }
  double a() const { return a_; }
  const QuadratureConfig& quadrature() const { return quad_; }

  SystemSpec with_chart(ChartId chart) const { return SystemSpec(algebra_, chart, coeffs_, a_, quad_); }

  /// FNV-1a over a canonical description; stable across runs and platforms.
  std::uint64_t hash() const {
    std::string text = std::string(to_string(algebra_)) + "|" + to_string(chart_) + "|" + std::to_string(a_);
    for (const auto* f : {&coeffs_.rho0, &coeffs_.b1, &coeffs_.b2, &coeffs_.b4, &coeffs_.b5}) {
      text += "|" + f->fingerprint();
    }
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    return h;
  }

 private:
  AlgebraId algebra_;
  ChartId chart_;
  Coefficients coeffs_;
  double a_;
  QuadratureConfig quad_;
};

/// Time derivative of the state in its own chart.
///
/// Terms are summed in global generator order and zero coefficients are
/// skipped, so a subalgebra system embedded in a larger one evaluates
/// identically.
inline Tangent rhs(const SystemSpec& spec, double t, const PhaseState& state) {
  if (state.chart == ChartId::Epidemic) require_regular_epidemic(state.first, state.second);
  Tangent d{0.0, 0.0};
  for (int i = 1; i < kGeneratorSlots; ++i) {
    if (!has_generator(spec.algebra(), i)) continue;
    const TimeFunction& f = spec.coefficients().of_generator(i);
    if (f.is_zero()) continue;
    const double c = f(t);
    const Tangent x = basis_vector_field(spec.algebra(), i, state);
    d[0] += c * x[0];
    d[1] += c * x[1];
  }
  return d;
}

/// Sum of b_i(t) h_i over the algebra's generators.
inline double hamiltonian(const SystemSpec& spec, double t, const PhaseState& state) {
  if (state.chart == ChartId::Epidemic) require_regular_epidemic(state.first, state.second);
  double h = 0.0;
  for (int i = 1; i < kGeneratorSlots; ++i) {
    if (!has_generator(spec.algebra(), i)) continue;
    const TimeFunction& f = spec.coefficients().of_generator(i);
    if (f.is_zero()) continue;
    h += f(t) * basis_hamiltonian(spec.algebra(), i, state);
  }
  return h;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::uint64_t spec_hash = 0;
  double tolerance = 0.0;
};

inline std::vector<double> linspace(double t0, double t1, int samples) {
  if (samples < 1) throw DomainError("samples must be positive");
  if (t0 == t1 || samples == 1) return {t0};
  std::vector<double> out(static_cast<std::size_t>(samples));
  const double step = (t1 - t0) / (samples - 1);
  for (int i = 0; i < samples; ++i) out[static_cast<std::size_t>(i)] = t0 + step * i;
  out.back() = t1;
  return out;
}

/// Integrates the system in the spec's chart and samples it at the given times.
inline Trajectory integrate_at(const SystemSpec& spec, const PhaseState& state0, double t0,
                               const std::vector<double>& times, double tol) {
  if (!(tol > 0.0)) throw DomainError("integration tolerance must be positive");
  const PhaseState start = to_chart(state0, spec.chart());
  if (start.chart == ChartId::Epidemic) require_regular_epidemic(start.first, start.second);
  const ChartId chart = spec.chart();
  auto f = [&](double t, const ode::State& y, ode::State& dy) {
    const Tangent d = rhs(spec, t, PhaseState{chart, y[0], y[1]});
    dy[0] = d[0];
    dy[1] = d[1];
  };
  ode::Options opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol;
  const auto ys = ode::integrate_dense(f, t0, {start.first, start.second}, times, opt);
  Trajectory tr;
  tr.times = times;
  tr.spec_hash = spec.hash();
  tr.tolerance = tol;
  tr.states.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (chart == ChartId::Epidemic && !is_regular_epidemic(ys[i][0], ys[i][1])) {
      throw IntegrationError("singular state encountered", times[i]);
    }
    tr.states.push_back(PhaseState{chart, ys[i][0], ys[i][1]});
  }
  return tr;
}

inline Trajectory integrate(const SystemSpec& spec, const PhaseState& state0, double t0, double t1, double tol,
                            int samples = 200) {
  return integrate_at(spec, state0, t0, linspace(t0, t1, samples), tol);
}

struct IntegrationConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

namespace detail {

inline void require_closed_form(const SystemSpec& spec) {
  if (spec.algebra() == AlgebraId::H6) {
    throw DomainError("closed-form solutions exist only for b2 and h4");
  }
}

/// The Cartesian closed form from precomputed Theta and weighted integrals.
inline std::array<double, 2> closed_form(const IntegrationConstants& c, double th, double w1, double w2) {
  return {(c.c1 + w1) * std::exp(th), (c.c2 + w2) * std::exp(-th)};
}

inline PhaseState in_chart(const std::array<double, 2>& xy, ChartId chart) {
  if (chart == ChartId::Cartesian) return PhaseState::cartesian(xy[0], xy[1]);
  const auto qp = cart_to_epi(xy[0], xy[1]);
  return PhaseState::epidemic(qp[0], qp[1]);
}

struct Integrals {
  double theta, w1, w2;
};

inline Integrals integrals_at(const SystemSpec& spec, double t) {
  const auto& k = spec.coefficients();
  const auto& cfg = spec.quadrature();
  return {theta(k.rho0, spec.a(), t, cfg), weighted_integral(k.b1, k.rho0, -1, spec.a(), t, cfg),
          weighted_integral(k.b2, k.rho0, +1, spec.a(), t, cfg)};
}

inline PhaseState exact_any(const SystemSpec& spec, const IntegrationConstants& c, double t) {
  require_closed_form(spec);
  const Integrals in = integrals_at(spec, t);
  return in_chart(closed_form(c, in.theta, in.w1, in.w2), spec.chart());
}

}  // namespace detail

/// Inverts the closed form at (t0, state0), so that exact_* reproduces state0 at t0.
inline IntegrationConstants constants_from_initial(const SystemSpec& spec, const PhaseState& state0, double t0) {
  detail::require_closed_form(spec);
  const PhaseState s = to_chart(state0, ChartId::Cartesian);
  const auto in = detail::integrals_at(spec, t0);
  return {s.first * std::exp(-in.theta) - in.w1, s.second * std::exp(in.theta) - in.w2};
}

/// Book system: x = c1 e^Theta, y = (c2 + int e^Theta b) e^-Theta, in the spec's chart.
inline PhaseState exact_book(const SystemSpec& spec, const IntegrationConstants& c, double t) {
  if (spec.algebra() != AlgebraId::B2) throw DomainError("exact_book requires algebra b2");
  return detail::exact_any(spec, c, t);
}

/// Oscillator system; with b1 = 0 the evaluation path is that of exact_book.
inline PhaseState exact_oscillator(const SystemSpec& spec, const IntegrationConstants& c, double t) {
  if (spec.algebra() != AlgebraId::H4) throw DomainError("exact_oscillator requires algebra h4");
  return detail::exact_any(spec, c, t);
}

/// The epidemic-chart book solution written directly in (q,p).
inline PhaseState exact_book_direct(const SystemSpec& spec, const IntegrationConstants& c, double t) {
  if (spec.algebra() != AlgebraId::B2) throw DomainError("exact_book requires algebra b2");
  if (c.c1 == 0.0) throw SingularPointError("c1 = 0 maps onto the pole x = 0");
  const auto in = detail::integrals_at(spec, t);
  const double y = c.c2 + in.w2;
  const double den = y * y - 1.0 / (c.c1 * c.c1);
  const double q = y * std::exp(in.theta) / den;
  const double p = (c.c1 * y * y - 1.0 / c.c1) * std::exp(-in.theta);
  require_regular_epidemic(q, p);
  return PhaseState::epidemic(q, p);
}

/// The epidemic-chart oscillator solution written directly in (q,p).
inline PhaseState exact_oscillator_direct(const SystemSpec& spec, const IntegrationConstants& c, double t) {
  if (spec.algebra() != AlgebraId::H4) throw DomainError("exact_oscillator requires algebra h4");
  const auto in = detail::integrals_at(spec, t);
  const double x = c.c1 + in.w1, y = c.c2 + in.w2;
  if (x == 0.0) throw SingularPointError("solution crosses the pole x = 0");
  const double u = x * x * y * y - 1.0;
  const double q = x * x * y * std::exp(in.theta) / u;
  const double p = u * std::exp(-in.theta) / x;
  require_regular_epidemic(q, p);
  return PhaseState::epidemic(q, p);
}

/// Closed-form trajectory at many times, with Theta and the weighted
/// integrals accumulated once over the sample grid.
inline Trajectory exact_trajectory(const SystemSpec& spec, const IntegrationConstants& c,
                                   const std::vector<double>& times) {
  detail::require_closed_form(spec);
  const auto& k = spec.coefficients();
  SweepIntegrals sweep(k.rho0, spec.a(), times, spec.quadrature());
  const auto w1 = sweep.weighted(k.b1, -1);
  const auto w2 = sweep.weighted(k.b2, +1);
  Trajectory tr;
  tr.times = times;
  tr.spec_hash = spec.hash();
  for (double t : times) {
    const auto xy = detail::closed_form(c, sweep.theta_at(t), sweep.weighted_at(w1, t), sweep.weighted_at(w2, t));
    try {
      tr.states.push_back(detail::in_chart(xy, spec.chart()));
    } catch (const SingularPointError& e) {
      throw IntegrationError(std::string("singular state encountered: ") + e.what(), t);
    }
  }
  return tr;
}

/// Book solution for constant rho0 and b = 1 with a = 0.
inline std::array<double, 2> exact_constant_book(double rho0, const IntegrationConstants& c, double t) {
  if (rho0 == 0.0) throw DomainError("exact_constant_book requires rho0 != 0");
  if (c.c1 == 0.0) throw SingularPointError("c1 = 0 maps onto the pole x = 0");
  const double e = std::exp(rho0 * t);
  const double d = e + c.c2 * rho0 - 1.0;
  const double q = rho0 * d * e / (d * d - rho0 * rho0 / (c.c1 * c.c1));
  const double p = (c.c1 * d * d / (rho0 * rho0) - 1.0 / c.c1) / e;
  require_regular_epidemic(q, p);
  return {q, p};
}

/// Constants making the constant-rate book solution coincide with the
/// Nakamura-Martinez form parametrized by (tc1, tc2).
inline IntegrationConstants nm_constants(double rho0, double tc1, double tc2) {
  if (rho0 == 0.0) throw DomainError("nm_constants requires rho0 != 0");
  const double radicand = tc1 * tc1 - tc2;
  if (!(radicand > 0.0)) throw DomainError("nm_constants requires tc1^2 > tc2");
  return {rho0 / std::sqrt(radicand), (tc1 + 1.0) / rho0};
}

/// The Nakamura-Martinez constant-rate solution in (q,p).
inline std::array<double, 2> nakamura_martinez(double rho0, double tc1, double tc2, double t) {
  const double radicand = tc1 * tc1 - tc2;
  if (!(radicand > 0.0)) throw DomainError("requires tc1^2 > tc2");
  const double e = std::exp(-rho0 * t);
  const double den = 1.0 + 2.0 * tc1 * e + tc2 * e * e;
  return {rho0 * (1.0 + tc1 * e) / den, den / (rho0 * std::sqrt(radicand) * e)};
}

struct SecondOrderCoeffs {
  double A;
  double B;
  double log_derivative;  // (log b4)'
};

/// Coefficients of x'' - (log b4)' x' + A x = B satisfied by the Cartesian x of
/// the two-photon system. Derivatives are central differences.
inline SecondOrderCoeffs h6_second_order_coeffs(const SystemSpec& spec, double t) {
  if (spec.algebra() != AlgebraId::H6) throw DomainError("second-order reduction requires algebra h6");
  const auto& k = spec.coefficients();
  const double b4 = k.b4(t);
  if (b4 == 0.0) throw DomainError("second-order reduction requires b4(t) != 0");
  const double rho0 = k.rho0(t), b1 = k.b1(t);
  const double l = derivative(k.b4, t) / b4;
  const double A = rho0 * l - rho0 * rho0 - b4 * k.b5(t) - derivative(k.rho0, t);
  const double B = -b1 * l + rho0 * b1 + k.b2(t) * b4 + derivative(k.b1, t);
  return {A, B, l};
}

}  // namespace lhsis
