#pragma once

// Time-dependent coefficients rho0(t), b1(t), b2(t), b4(t), b5(t) and the
// integrals built from them:
//
//   Theta(t)              = int_a^t rho0(s) ds
//   weighted_integral(t)  = int_a^t exp(sign * Theta(u)) f(u) du

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lhsis/error.hpp"
#include "lhsis/expression.hpp"
#include "lhsis/quadrature.hpp"

namespace lhsis {

struct QuadratureConfig {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int max_depth = 40;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature tolerances must be > 0");
    if (max_depth < 1) throw DomainError("quadrature depth must be >= 1");
  }
};

enum class Interpolation { Linear = 1, Cubic = 3 };

class TimeFunction {
 public:
  TimeFunction() : TimeFunction(constant(0.0)) {}

  static TimeFunction constant(double value) { return TimeFunction(Constant{value}); }

  static TimeFunction expression(Expression e) { return TimeFunction(std::move(e)); }

  /// Sampled values; times must be strictly increasing. Cubic uses a natural spline.
  static TimeFunction table(std::vector<double> times, std::vector<double> values,
                            Interpolation order = Interpolation::Linear) {
    if (times.size() != values.size()) throw DomainError("table: times and values differ in length");
    if (times.size() < 2) throw DomainError("table: at least two samples are required");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw DomainError("table: sample times must be strictly increasing");
    }
    auto t = std::make_shared<Table>();
    t->times = std::move(times);
    t->values = std::move(values);
    t->order = order;
    if (order == Interpolation::Cubic) t->second = natural_spline(t->times, t->values);
    return TimeFunction(TablePtr(std::move(t)));
  }

  double operator()(double t) const {
    return std::visit([t](const auto& v) { return evaluate(v, t); }, repr_);
  }

  /// True for the constant zero (or a t-free expression evaluating to zero).
  bool is_zero() const {
    const auto c = constant_value();
    return c && *c == 0.0;
  }

  std::optional<double> constant_value() const {
    if (auto c = std::get_if<Constant>(&repr_)) return c->value;
    if (auto e = std::get_if<Expression>(&repr_)) return e->constant_value();
    return std::nullopt;
  }

  /// Closed interval on which the function may be evaluated, if bounded.
  std::optional<std::pair<double, double>> span() const {
    if (auto t = std::get_if<TablePtr>(&repr_)) return std::pair{(*t)->times.front(), (*t)->times.back()};
    return std::nullopt;
  }

  /// Points where the function is only piecewise smooth (table nodes).
  std::span<const double> breakpoints() const {
    if (auto t = std::get_if<TablePtr>(&repr_)) return (*t)->times;
    return {};
  }

  std::string describe() const {
    if (auto c = std::get_if<Constant>(&repr_)) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), c->value);
      return std::string(buf, res.ptr);
    }
    if (auto e = std::get_if<Expression>(&repr_)) return e->str();
    const auto& t = *std::get<TablePtr>(repr_);
    return "table[" + std::to_string(t.times.size()) + (t.order == Interpolation::Cubic ? ",cubic]" : ",linear]");
  }

  /// describe() plus every table sample; distinguishes any two functions.
  std::string fingerprint() const {
    auto t = std::get_if<TablePtr>(&repr_);
    if (!t) return describe();
    std::string out = describe();
    char buf[64];
    for (std::size_t i = 0; i < (*t)->times.size(); ++i) {
      out += ';';
      out.append(buf, std::to_chars(buf, buf + sizeof(buf), (*t)->times[i]).ptr);
      out += ':';
      out.append(buf, std::to_chars(buf, buf + sizeof(buf), (*t)->values[i]).ptr);
    }
    return out;
  }

 private:
  struct Constant {
    double value;
  };
  struct Table {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> second;
    Interpolation order = Interpolation::Linear;
  };
  using TablePtr = std::shared_ptr<const Table>;

  explicit TimeFunction(Constant c) : repr_(c) {}
  explicit TimeFunction(Expression e) : repr_(std::move(e)) {}
  explicit TimeFunction(TablePtr t) : repr_(std::move(t)) {}

  static double evaluate(const Constant& c, double) { return c.value; }

  static double evaluate(const Expression& e, double t) {
    const double v = e(t);
    if (!std::isfinite(v)) {
      throw DomainError("coefficient " + e.str() + " is not finite at t=" + std::to_string(t));
    }
    return v;
  }

  static double evaluate(const TablePtr& tp, double t) {
    const Table& tab = *tp;
    if (!(t >= tab.times.front() && t <= tab.times.back())) {
      throw DomainError("table evaluated at t=" + std::to_string(t) + " outside [" +
                        std::to_string(tab.times.front()) + ", " + std::to_string(tab.times.back()) + "]");
    }
    auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - tab.times.begin());
    if (hi == tab.times.size()) return tab.values.back();
    const std::size_t lo = hi - 1;
    if (t == tab.times[lo]) return tab.values[lo];
    const double h = tab.times[hi] - tab.times[lo];
    const double A = (tab.times[hi] - t) / h;
    const double B = (t - tab.times[lo]) / h;
    double v = A * tab.values[lo] + B * tab.values[hi];
    if (tab.order == Interpolation::Cubic) {
      v += ((A * A * A - A) * tab.second[lo] + (B * B * B - B) * tab.second[hi]) * h * h / 6.0;
    }
    return v;
  }

  static std::vector<double> natural_spline(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0), u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
      const double p = sig * m[i - 1] + 2.0;
      m[i] = (sig - 1.0) / p;
      u[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
      u[i] = (6.0 * u[i] / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    m[n - 1] = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) m[k] = m[k] * m[k + 1] + u[k];
    return m;
  }

  std::variant<Constant, Expression, TablePtr> repr_;
};

inline TimeFunction parse_expression(std::string_view text) {
  return TimeFunction::expression(Expression::parse(text));
}

inline double eval(const TimeFunction& f, double t) { return f(t); }

/// Central-difference derivative with the cube-root-of-epsilon step.
inline double derivative(const TimeFunction& f, double t) {
  if (f.constant_value()) return 0.0;
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(t));
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

namespace detail {

inline void check_domain(const TimeFunction& f, double lo, double hi) {
  if (auto s = f.span()) {
    if (lo < s->first || hi > s->second) {
      throw DomainError("integration interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] leaves the tabulated span [" + std::to_string(s->first) + ", " +
                        std::to_string(s->second) + "]");
    }
  }
}

/// Integrates g over [lo,hi] (lo <= hi), splitting at the breakpoints of the
/// coefficient functions that g depends on.
template <class G>
double integrate_pieces(G&& g, double lo, double hi, std::span<const double> cuts_a,
                        std::span<const double> cuts_b, const QuadratureConfig& cfg) {
  std::vector<double> nodes{lo};
  for (auto cuts : {cuts_a, cuts_b}) {
    for (double c : cuts) {
      if (c > lo && c < hi) nodes.push_back(c);
    }
  }
  nodes.push_back(hi);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const double pieces = static_cast<double>(nodes.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    total += quadrature::integrate(g, nodes[i], nodes[i + 1], cfg.abs_tol / pieces, cfg.rel_tol,
                                   cfg.max_depth)
                 .value;
  }
  return total;
}

template <class G>
double integrate_oriented(G&& g, double a, double t, std::span<const double> cuts_a,
                          std::span<const double> cuts_b, const QuadratureConfig& cfg) {
  if (a == t) return 0.0;
  if (a < t) return integrate_pieces(g, a, t, cuts_a, cuts_b, cfg);
  return -integrate_pieces(g, t, a, cuts_a, cuts_b, cfg);
}

}  // namespace detail

/// Theta(t) = int_a^t rho0(s) ds. Exactly antisymmetric in (a, t).
inline double theta(const TimeFunction& rho0, double a, double t, const QuadratureConfig& cfg = {}) {
  if (a == t) return 0.0;
  if (auto c = rho0.constant_value()) return *c * (t - a);
  detail::check_domain(rho0, std::min(a, t), std::max(a, t));
  return detail::integrate_oriented(rho0, a, t, rho0.breakpoints(), {}, cfg);
}

/// int_a^t exp(sign * Theta(u)) f(u) du, with Theta anchored at the same a.
inline double weighted_integral(const TimeFunction& f, const TimeFunction& rho0, int sign, double a,
                                double t, const QuadratureConfig& cfg = {}) {
  if (sign != 1 && sign != -1) throw DomainError("weighted_integral: sign must be +1 or -1");
  if (a == t || f.is_zero()) return 0.0;
  const double lo = std::min(a, t), hi = std::max(a, t);
  detail::check_domain(f, lo, hi);
  detail::check_domain(rho0, lo, hi);
  auto integrand = [&](double u) { return std::exp(sign * theta(rho0, a, u, cfg)) * f(u); };
  return detail::integrate_oriented(integrand, a, t, f.breakpoints(), rho0.breakpoints(), cfg);
}

/// Theta and weighted integrals memoized on a fixed time grid.
///
/// Values at every grid node are accumulated panel by panel from the anchor a,
/// so a sweep over n sample times costs O(n) panel quadratures instead of
/// O(n) full-length ones. Immutable after construction.
class SweepIntegrals {
 public:
  SweepIntegrals(TimeFunction rho0, double a, std::vector<double> grid, QuadratureConfig cfg = {})
      : rho0_(std::move(rho0)), a_(a), cfg_(cfg) {
    nodes_ = std::move(grid);
    nodes_.push_back(a);
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    detail::check_domain(rho0_, nodes_.front(), nodes_.back());
    anchor_ = static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), a_) - nodes_.begin());
    theta_.assign(nodes_.size(), 0.0);
    for (std::size_t i = anchor_ + 1; i < nodes_.size(); ++i) {
      theta_[i] = theta_[i - 1] + theta(rho0_, nodes_[i - 1], nodes_[i], cfg_);
    }
    for (std::size_t i = anchor_; i-- > 0;) {
      theta_[i] = theta_[i + 1] + theta(rho0_, nodes_[i + 1], nodes_[i], cfg_);
    }
  }

  double a() const { return a_; }

  double theta_at(double t) const { return theta_[index_of(t)]; }

  /// int_a^t exp(sign * Theta(u)) f(u) du at every grid node, in node order.
  std::vector<double> weighted(const TimeFunction& f, int sign) const {
    std::vector<double> out(nodes_.size(), 0.0);
    if (f.is_zero()) return out;
    detail::check_domain(f, nodes_.front(), nodes_.back());
    auto panel = [&](std::size_t from, std::size_t to) {
      const double base = theta_[from], left = nodes_[from];
      auto g = [&](double u) { return std::exp(sign * (base + theta(rho0_, left, u, cfg_))) * f(u); };
      return detail::integrate_oriented(g, nodes_[from], nodes_[to], f.breakpoints(), rho0_.breakpoints(), cfg_);
    };
    for (std::size_t i = anchor_ + 1; i < nodes_.size(); ++i) out[i] = out[i - 1] + panel(i - 1, i);
    for (std::size_t i = anchor_; i-- > 0;) out[i] = out[i + 1] + panel(i + 1, i);
    return out;
  }

  double weighted_at(const std::vector<double>& values, double t) const { return values[index_of(t)]; }

 private:
  std::size_t index_of(double t) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.end() || *it != t) throw DomainError("time " + std::to_string(t) + " is not on the sweep grid");
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  TimeFunction rho0_;
  double a_;
  QuadratureConfig cfg_;
  std::vector<double> nodes_;
  std::size_t anchor_ = 0;
  std::vector<double> theta_;
};

}  // namespace lhsis
