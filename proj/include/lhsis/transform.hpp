#pragma once

// Canonical change of chart between the Cartesian plane (x,y) and the
// epidemic variables (q,p) = (<rho>, 1/sigma):
//
//   x = (q^2 p^2 - 1)/p,      y = q p^2/(q^2 p^2 - 1)
//   q = x^2 y/(x^2 y^2 - 1),  p = (x^2 y^2 - 1)/x
//
// with dq^dp = dx^dy.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "lhsis/error.hpp"
#include "lhsis/numdiff.hpp"

namespace lhsis {

/// Points closer than this to a pole of the chart change are rejected.
inline constexpr double kPoleGuard = 1e-12;

enum class ChartId { Cartesian, Epidemic };

inline const char* to_string(ChartId c) { return c == ChartId::Cartesian ? "cartesian" : "epidemic"; }

struct PhaseState {
  ChartId chart = ChartId::Cartesian;
  double first = 0.0;   // x or q
  double second = 0.0;  // y or p

  static PhaseState cartesian(double x, double y) { return {ChartId::Cartesian, x, y}; }
  static PhaseState epidemic(double q, double p) { return {ChartId::Epidemic, q, p}; }

  std::array<double, 2> coords() const { return {first, second}; }
};

struct EpidemicObservables {
  double mean_rho;
  double variance;
};

/// Epidemic-chart formulas need p != 0 and q^2 p^2 != 1.
inline bool is_regular_epidemic(double q, double p) {
  const double qp = q * p;
  return std::abs(p) >= kPoleGuard && std::abs((qp - 1.0) * (qp + 1.0)) >= kPoleGuard;
}

/// The inverse map needs x != 0 and x^2 y^2 != 1.
inline bool is_invertible_cartesian(double x, double y) {
  const double xy = x * y;
  return std::abs(x) >= kPoleGuard && std::abs((xy - 1.0) * (xy + 1.0)) >= kPoleGuard;
}

inline void require_regular_epidemic(double q, double p) {
  if (!is_regular_epidemic(q, p)) {
    throw SingularPointError("epidemic state (q,p)=(" + std::to_string(q) + ", " + std::to_string(p) +
                             ") lies on a pole (p=0 or q^2p^2=1)");
  }
}

inline void require_invertible_cartesian(double x, double y) {
  if (!is_invertible_cartesian(x, y)) {
    throw SingularPointError("Cartesian state (x,y)=(" + std::to_string(x) + ", " + std::to_string(y) +
                             ") lies on a pole (x=0 or x^2y^2=1)");
  }
}

inline std::array<double, 2> epi_to_cart(double q, double p) {
  require_regular_epidemic(q, p);
  const double qp = q * p;
  const double u = (qp - 1.0) * (qp + 1.0);
  return {u / p, qp * p / u};
}

inline std::array<double, 2> cart_to_epi(double x, double y) {
  require_invertible_cartesian(x, y);
  const double xy = x * y;
  const double w = (xy - 1.0) * (xy + 1.0);
  return {xy * x / w, w / x};
}

inline EpidemicObservables observables(double q, double p) {
  if (std::abs(p) < kPoleGuard) throw SingularPointError("variance undefined at p=0");
  return {q, 1.0 / (p * p)};
}

inline PhaseState to_chart(const PhaseState& s, ChartId target) {
  if (s.chart == target) return s;
  if (target == ChartId::Cartesian) {
    auto [x, y] = epi_to_cart(s.first, s.second);
    return PhaseState::cartesian(x, y);
  }
  auto [q, p] = cart_to_epi(s.first, s.second);
  return PhaseState::epidemic(q, p);
}

namespace detail {

template <class T>
std::array<T, 2> epi_map(T q, T p) {
  const T qp = q * p;
  const T u = (qp - 1) * (qp + 1);
  return {u / p, qp * p / u};
}

template <class T>
std::array<T, 2> cart_map(T x, T y) {
  const T xy = x * y;
  const T w = (xy - 1) * (xy + 1);
  return {xy * x / w, w / x};
}

}  // namespace detail

/// Length scales for finite differences at a regular point: the coordinate
/// magnitude (at least 1), capped by the distance to the pole
/// w = (ab)^2 - 1 measured as |w|/|dw|, and for the coordinate that appears
/// as a divisor, by its own magnitude.
inline std::array<double, 2> local_scales(const PhaseState& point) {
  const double a = point.first, b = point.second;
  const double w = std::abs((a * b - 1.0) * (a * b + 1.0));
  double la = std::min(std::max(1.0, std::abs(a)), w / std::abs(2.0 * a * b * b));
  double lb = std::min(std::max(1.0, std::abs(b)), w / std::abs(2.0 * a * a * b));
  if (point.chart == ChartId::Epidemic) {
    lb = std::min(lb, std::abs(b));
  } else {
    la = std::min(la, std::abs(a));
  }
  return {la, lb};
}

/// Determinant of the finite-difference Jacobian of the chart change leaving
/// the point's chart. Equal to 1 up to discretization error.
///
/// The map is evaluated in extended precision with steps eps^(1/5) times
/// local_scales().
inline double jacobian_det(const PhaseState& point) {
  using T = long double;
  const bool epi = point.chart == ChartId::Epidemic;
  if (epi) {
    require_regular_epidemic(point.first, point.second);
  } else {
    require_invertible_cartesian(point.first, point.second);
  }
  auto map = [&](T u, T v) { return epi ? detail::epi_map<T>(u, v) : detail::cart_map<T>(u, v); };
  const T a = point.first, b = point.second;
  const auto scales = local_scales(point);
  const auto d1 = numdiff::central([&](T o) { return map(a + o, b); }, numdiff::step_for<T>(scales[0]));
  const auto d2 = numdiff::central([&](T o) { return map(a, b + o); }, numdiff::step_for<T>(scales[1]));
  return static_cast<double>(d1[0] * d2[1] - d2[0] * d1[1]);
}

}  // namespace lhsis
