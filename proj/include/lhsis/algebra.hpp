#pragma once

// The Lie-Hamilton algebras b2 < h4 < h6 on the plane.
//
// Generators share one global numbering so the inclusions are index
// preserving: b2 = {3 (dilation A), 2 (translation B)}, h4 = {1,2,3} + central 0,
// h6 = {1,...,5} + central 0. In Cartesian coordinates:
//
//   X1 = d/dx        h1 = y
//   X2 = d/dy        h2 = -x
//   X3 = x d/dx - y d/dy   h3 = x y
//   X4 = y d/dx      h4 = y^2/2
//   X5 = x d/dy      h5 = -x^2/2
//
// [X_a, X_b] = sum_c C_ab^c X_c and {h_a, h_b} = -sum_c C_ab^c h_c (+ h0 for {h1,h2}),
// with {f,g} = f_x g_y - f_y g_x, i.e. i_X omega = dh for omega = dx^dy.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lhsis/error.hpp"
#include "lhsis/numdiff.hpp"
#include "lhsis/transform.hpp"

namespace lhsis {

enum class AlgebraId { B2, H4, H6 };

inline const char* to_string(AlgebraId id) {
  switch (id) {
    case AlgebraId::B2: return "b2";
    case AlgebraId::H4: return "h4";
    case AlgebraId::H6: return "h6";
  }
  return "?";
}

inline constexpr int kGeneratorSlots = 6;  // index 0 is the central generator

/// Values (or coefficients) indexed by global generator number 0..5.
using GeneratorVector = std::array<double, kGeneratorSlots>;
using Tangent = std::array<double, 2>;

/// Non-central generators of the algebra.
inline std::span<const int> generators(AlgebraId id) {
  static constexpr std::array<int, 2> b2{3, 2};
  static constexpr std::array<int, 3> h4{1, 2, 3};
  static constexpr std::array<int, 5> h6{1, 2, 3, 4, 5};
  switch (id) {
    case AlgebraId::B2: return b2;
    case AlgebraId::H4: return h4;
    case AlgebraId::H6: return h6;
  }
  return {};
}

inline bool has_generator(AlgebraId id, int i) {
  auto g = generators(id);
  return std::find(g.begin(), g.end(), i) != g.end();
}

inline bool has_central(AlgebraId id) { return id != AlgebraId::B2; }

struct StructureTable {
  using Cube = std::array<std::array<GeneratorVector, kGeneratorSlots>, kGeneratorSlots>;

  AlgebraId id;
  Cube commutator{};  // [X_a, X_b] = sum_c commutator[a][b][c] X_c
  Cube poisson{};     // {h_a, h_b} = sum_c poisson[a][b][c] h_c, c = 0 included
};

inline StructureTable structure_constants(AlgebraId id) {
  StructureTable t{id};
  auto set = [&](int a, int b, int c, double value) {
    if (!has_generator(id, a) || !has_generator(id, b)) return;
    t.commutator[a][b][c] = value;
    t.commutator[b][a][c] = -value;
  };
  set(1, 3, 1, 1.0);
  set(1, 5, 2, 1.0);
  set(2, 3, 2, -1.0);
  set(2, 4, 1, 1.0);
  set(3, 4, 4, -2.0);
  set(3, 5, 5, 2.0);
  set(4, 5, 3, -1.0);
  for (int a = 0; a < kGeneratorSlots; ++a) {
    for (int b = 0; b < kGeneratorSlots; ++b) {
      for (int c = 0; c < kGeneratorSlots; ++c) t.poisson[a][b][c] = -t.commutator[a][b][c];
    }
  }
  if (has_central(id)) {
    t.poisson[1][2][0] = 1.0;
    t.poisson[2][1][0] = -1.0;
  }
  return t;
}

namespace detail {

inline void require_generator(AlgebraId id, int i, bool allow_central) {
  if (allow_central && i == 0 && has_central(id)) return;
  if (!has_generator(id, i)) {
    throw DomainError("generator " + std::to_string(i) + " does not belong to " + to_string(id));
  }
}

template <class T = double>
std::array<T, 2> cartesian_field(int i, T x, T y) {
  switch (i) {
    case 1: return {1, 0};
    case 2: return {0, 1};
    case 3: return {x, -y};
    case 4: return {y, 0};
    case 5: return {0, x};
  }
  return {0, 0};
}

template <class T = double>
std::array<T, 2> epidemic_field(int i, T q, T p) {
  require_regular_epidemic(static_cast<double>(q), static_cast<double>(p));
  const T qp = q * p;
  const T u = (qp - 1) * (qp + 1);  // q^2 p^2 - 1
  switch (i) {
    case 1: return {-2 * qp / (u * u), p * p * (qp * qp + 1) / (u * u)};
    case 2: return {-(q * q + 1 / (p * p)), 2 * qp};
    case 3: return {q, -p};
    case 4: return {-2 * q * q * p * p * p / (u * u * u), q * p * p * p * p * (qp * qp + 1) / (u * u * u)};
    case 5: return {(1 - qp * qp * qp * qp) / (p * p * p), 2 * q * u};
  }
  return {0, 0};
}

template <class T = double>
T cartesian_hamiltonian(int i, T x, T y) {
  switch (i) {
    case 0: return 1;
    case 1: return y;
    case 2: return -x;
    case 3: return x * y;
    case 4: return y * y / 2;
    case 5: return -x * x / 2;
  }
  return 0;
}

template <class T = double>
T epidemic_hamiltonian(int i, T q, T p) {
  require_regular_epidemic(static_cast<double>(q), static_cast<double>(p));
  const T qp = q * p;
  const T u = (qp - 1) * (qp + 1);
  switch (i) {
    case 0: return 1;
    case 1: return qp * p / u;
    case 2: return -u / p;
    case 3: return qp;
    case 4: {
      const T h1 = qp * p / u;
      return h1 * h1 / 2;
    }
    case 5: {
      const T x = u / p;
      return -x * x / 2;
    }
  }
  return 0;
}

// Finite differences run in extended precision; the epidemic formulas lose
// digits to cancellation near the pole.
using Wide = long double;

inline std::array<Wide, 2> fd_steps(const PhaseState& s) {
  const auto l = local_scales(s);
  return {numdiff::step_for<Wide>(l[0]), numdiff::step_for<Wide>(l[1])};
}

inline std::array<Wide, 2> shifted(const PhaseState& s, int axis, Wide h) {
  std::array<Wide, 2> out{s.first, s.second};
  out[axis] += h;
  return out;
}

inline std::array<Wide, 2> wide_field(int i, ChartId chart, std::array<Wide, 2> c) {
  return chart == ChartId::Cartesian ? cartesian_field<Wide>(i, c[0], c[1]) : epidemic_field<Wide>(i, c[0], c[1]);
}

inline Wide wide_hamiltonian(int i, ChartId chart, std::array<Wide, 2> c) {
  return chart == ChartId::Cartesian ? cartesian_hamiltonian<Wide>(i, c[0], c[1])
                                     : epidemic_hamiltonian<Wide>(i, c[0], c[1]);
}

}  // namespace detail

inline Tangent basis_vector_field(AlgebraId id, int i, const PhaseState& point) {
  detail::require_generator(id, i, false);
  return point.chart == ChartId::Cartesian ? detail::cartesian_field(i, point.first, point.second)
                                           : detail::epidemic_field(i, point.first, point.second);
}

inline Tangent basis_vector_field(AlgebraId id, int i, const PhaseState& point, ChartId chart) {
  return basis_vector_field(id, i, PhaseState{chart, point.first, point.second});
}

/// h_i at the point; i = 0 is the central generator, identically 1.
inline double basis_hamiltonian(AlgebraId id, int i, const PhaseState& point) {
  detail::require_generator(id, i, true);
  return point.chart == ChartId::Cartesian ? detail::cartesian_hamiltonian(i, point.first, point.second)
                                           : detail::epidemic_hamiltonian(i, point.first, point.second);
}

inline double basis_hamiltonian(AlgebraId id, int i, const PhaseState& point, ChartId chart) {
  return basis_hamiltonian(id, i, PhaseState{chart, point.first, point.second});
}

/// All generator values (h_0 .. h_5) at a point; slots outside the algebra are 0.
inline GeneratorVector hamiltonian_values(AlgebraId id, const PhaseState& point) {
  GeneratorVector v{};
  if (has_central(id)) v[0] = 1.0;
  for (int i : generators(id)) v[i] = basis_hamiltonian(id, i, point);
  return v;
}

/// h4: C = v1 v2 + v3 v0.  h6: C = 2(v1^2 v5 - v2^2 v4 - v1 v2 v3) - v0 (v3^2 + 4 v4 v5).
inline double casimir_value(AlgebraId id, const GeneratorVector& v) {
  switch (id) {
    case AlgebraId::B2: throw DomainError("the book algebra b2 has no nonconstant Casimir");
    case AlgebraId::H4: return v[1] * v[2] + v[3] * v[0];
    case AlgebraId::H6:
      return 2.0 * (v[1] * v[1] * v[5] - v[2] * v[2] * v[4] - v[1] * v[2] * v[3]) -
             v[0] * (v[3] * v[3] + 4.0 * v[4] * v[5]);
  }
  return 0.0;
}

inline GeneratorVector casimir_gradient(AlgebraId id, const GeneratorVector& v) {
  switch (id) {
    case AlgebraId::B2: throw DomainError("the book algebra b2 has no nonconstant Casimir");
    case AlgebraId::H4: return {v[3], v[2], v[1], v[0], 0.0, 0.0};
    case AlgebraId::H6:
      return {-(v[3] * v[3] + 4.0 * v[4] * v[5]),
              2.0 * (2.0 * v[1] * v[5] - v[2] * v[3]),
              2.0 * (-2.0 * v[2] * v[4] - v[1] * v[3]),
              -2.0 * v[1] * v[2] - 2.0 * v[0] * v[3],
              -2.0 * v[2] * v[2] - 4.0 * v[0] * v[5],
              2.0 * v[1] * v[1] - 4.0 * v[0] * v[4]};
  }
  return {};
}

/// Lie-Poisson bracket {C, v_i} on generator values, built from the table.
inline double casimir_bracket(AlgebraId id, int i, const GeneratorVector& v) {
  const StructureTable t = structure_constants(id);
  const GeneratorVector grad = casimir_gradient(id, v);
  double total = 0.0;
  for (int a = 0; a < kGeneratorSlots; ++a) {
    double bracket = 0.0;
    for (int c = 0; c < kGeneratorSlots; ++c) bracket += t.poisson[a][i][c] * v[c];
    total += grad[a] * bracket;
  }
  return total;
}

/// Finite-difference gradient (d/dfirst, d/dsecond) of h_i.
inline std::array<double, 2> hamiltonian_gradient_numeric(AlgebraId id, int i, const PhaseState& point) {
  (void)basis_hamiltonian(id, i, point);
  const auto h = detail::fd_steps(point);
  std::array<double, 2> g{};
  for (int axis = 0; axis < 2; ++axis) {
    g[axis] = static_cast<double>(numdiff::central_scalar(
        [&](detail::Wide o) { return detail::wide_hamiltonian(i, point.chart, detail::shifted(point, axis, o)); },
        h[axis]));
  }
  return g;
}

/// {h_a, h_b} = d1 h_a d2 h_b - d2 h_a d1 h_b by central differences.
inline double poisson_bracket_numeric(AlgebraId id, int a, int b, const PhaseState& point) {
  (void)basis_hamiltonian(id, a, point);
  (void)basis_hamiltonian(id, b, point);
  const auto ga = hamiltonian_gradient_numeric(id, a, point);
  const auto gb = hamiltonian_gradient_numeric(id, b, point);
  return ga[0] * gb[1] - ga[1] * gb[0];
}

inline double poisson_bracket_numeric(AlgebraId id, int a, int b, const PhaseState& point, ChartId chart) {
  return poisson_bracket_numeric(id, a, b, PhaseState{chart, point.first, point.second});
}

/// -sum_c C_ab^c h_c (plus the central term) evaluated at the point.
inline double poisson_bracket_table(AlgebraId id, int a, int b, const PhaseState& point) {
  const StructureTable t = structure_constants(id);
  const GeneratorVector h = hamiltonian_values(id, point);
  double total = 0.0;
  for (int c = 0; c < kGeneratorSlots; ++c) total += t.poisson[a][b][c] * h[c];
  return total;
}

/// [X_a, X_b]^k = X_a^j d_j X_b^k - X_b^j d_j X_a^k with central-difference Jacobians.
inline Tangent commutator_numeric(AlgebraId id, int a, int b, const PhaseState& point) {
  using detail::Wide;
  (void)basis_vector_field(id, a, point);
  (void)basis_vector_field(id, b, point);
  const auto h = detail::fd_steps(point);
  const std::array<Wide, 2> at{point.first, point.second};
  auto jac = [&](int i) {
    std::array<std::array<Wide, 2>, 2> d{};  // d[axis][component]
    for (int axis = 0; axis < 2; ++axis) {
      d[axis] = numdiff::central(
          [&](Wide o) { return detail::wide_field(i, point.chart, detail::shifted(point, axis, o)); }, h[axis]);
    }
    return d;
  };
  const auto xa = detail::wide_field(a, point.chart, at);
  const auto xb = detail::wide_field(b, point.chart, at);
  const auto da = jac(a);
  const auto db = jac(b);
  Tangent out{};
  for (int k = 0; k < 2; ++k) {
    Wide acc = 0;
    for (int j = 0; j < 2; ++j) acc += xa[j] * db[j][k] - xb[j] * da[j][k];
    out[k] = static_cast<double>(acc);
  }
  return out;
}

/// sum_c C_ab^c X_c at the point.
inline Tangent commutator_table(AlgebraId id, int a, int b, const PhaseState& point) {
  const StructureTable t = structure_constants(id);
  Tangent out{};
  for (int c : generators(id)) {
    const double coef = t.commutator[a][b][c];
    if (coef == 0.0) continue;
    const Tangent xc = basis_vector_field(id, c, point);
    out[0] += coef * xc[0];
    out[1] += coef * xc[1];
  }
  return out;
}

}  // namespace lhsis
