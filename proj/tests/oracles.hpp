#pragma once

// Reference formulas written out independently of the library, used as test
// oracles.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

namespace oracle {

using Vec2 = std::array<double, 2>;

inline Vec2 epi_to_cart(double q, double p) {
  return {(q * q * p * p - 1.0) / p, q * p * p / (q * q * p * p - 1.0)};
}

inline Vec2 cart_to_epi(double x, double y) {
  return {x * x * y / (x * x * y * y - 1.0), (x * x * y * y - 1.0) / x};
}

// d(x,y)/d(q,p), rows (dx, dy), columns (dq, dp).
inline std::array<Vec2, 2> jacobian_epi_to_cart(double q, double p) {
  const double u = q * q * p * p - 1.0;
  return {{{2.0 * q * p, q * q + 1.0 / (p * p)},
           {-p * p * (q * q * p * p + 1.0) / (u * u), -2.0 * q * p / (u * u)}}};
}

inline double det(const std::array<Vec2, 2>& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Vec2 cartesian_field(int i, double x, double y) {
  switch (i) {
    case 1: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
    case 3: return {x, -y};
    case 4: return {y, 0.0};
    case 5: return {0.0, x};
  }
  return {0.0, 0.0};
}

// Pulls the Cartesian field back through the inverse Jacobian.
inline Vec2 epidemic_field(int i, double q, double p) {
  const auto c = epi_to_cart(q, p);
  const auto v = cartesian_field(i, c[0], c[1]);
  const auto j = jacobian_epi_to_cart(q, p);
  const double d = det(j);
  return {(j[1][1] * v[0] - j[0][1] * v[1]) / d, (-j[1][0] * v[0] + j[0][0] * v[1]) / d};
}

inline double cartesian_hamiltonian(int i, double x, double y) {
  switch (i) {
    case 0: return 1.0;
    case 1: return y;
    case 2: return -x;
    case 3: return x * y;
    case 4: return 0.5 * y * y;
    case 5: return -0.5 * x * x;
  }
  return 0.0;
}

inline double epidemic_hamiltonian(int i, double q, double p) {
  const auto c = epi_to_cart(q, p);
  return cartesian_hamiltonian(i, c[0], c[1]);
}

// [X_a, X_b] = sum c X_c for the two-photon algebra, as listed pairwise.
struct Term {
  int gen;
  double coef;
};

inline std::vector<Term> commutator(int a, int b) {
  if (a == b) return {};
  if (a > b) {
    auto t = commutator(b, a);
    for (auto& x : t) x.coef = -x.coef;
    return t;
  }
  static const std::map<std::pair<int, int>, std::vector<Term>> table = {
      {{1, 2}, {}},         {{1, 3}, {{1, 1.0}}},  {{1, 4}, {}},          {{1, 5}, {{2, 1.0}}},
      {{2, 3}, {{2, -1.0}}}, {{2, 4}, {{1, 1.0}}},  {{2, 5}, {}},          {{3, 4}, {{4, -2.0}}},
      {{3, 5}, {{5, 2.0}}}, {{4, 5}, {{3, -1.0}}},
  };
  return table.at({a, b});
}

// {h_a, h_b} = sum c h_c, index 0 the central generator.
inline std::vector<Term> poisson(int a, int b) {
  if (a == b) return {};
  if (a > b) {
    auto t = poisson(b, a);
    for (auto& x : t) x.coef = -x.coef;
    return t;
  }
  static const std::map<std::pair<int, int>, std::vector<Term>> table = {
      {{1, 2}, {{0, 1.0}}},  {{1, 3}, {{1, -1.0}}}, {{1, 4}, {}},          {{1, 5}, {{2, -1.0}}},
      {{2, 3}, {{2, 1.0}}},  {{2, 4}, {{1, -1.0}}}, {{2, 5}, {}},          {{3, 4}, {{4, 2.0}}},
      {{3, 5}, {{5, -2.0}}}, {{4, 5}, {{3, 1.0}}},
  };
  return table.at({a, b});
}

inline std::vector<int> generators(int algebra) {  // 2 = b2, 4 = h4, 6 = h6
  if (algebra == 2) return {3, 2};
  if (algebra == 4) return {1, 2, 3};
  return {1, 2, 3, 4, 5};
}

// Constant-rate solution in (q,p), parametrized by (tc1, tc2).
inline Vec2 nakamura_martinez(double rho0, double tc1, double tc2, double t) {
  const double e = std::exp(-rho0 * t);
  const double d = 1.0 + 2.0 * tc1 * e + tc2 * e * e;
  return {rho0 * (1.0 + tc1 * e) / d, d / (rho0 * std::sqrt(tc1 * tc1 - tc2) * e)};
}

// Classical fixed-step RK4 on R^n.
using System = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

inline std::vector<double> rk4(const System& f, double t0, std::vector<double> y, double t1, int steps) {
  const std::size_t n = y.size();
  const double h = (t1 - t0) / steps;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    f(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

// Two-photon Cartesian system dx = rho0 x + b1 + b4 y, dy = -rho0 y + b2 + b5 x.
struct Coeffs {
  std::function<double(double)> rho0, b1, b2, b4, b5;
};

inline System cartesian_system(const Coeffs& c) {
  return [c](double t, const std::vector<double>& y, std::vector<double>& d) {
    for (std::size_t i = 0; i + 1 < y.size(); i += 2) {
      d[i] = c.rho0(t) * y[i] + c.b1(t) + c.b4(t) * y[i + 1];
      d[i + 1] = -c.rho0(t) * y[i + 1] + c.b2(t) + c.b5(t) * y[i];
    }
  };
}

inline double scaled(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace oracle
