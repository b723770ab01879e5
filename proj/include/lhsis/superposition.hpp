#pragma once

// Constants of motion on diagonal prolongations and the superposition rules
// for the oscillator (h4) and two-photon (h6) systems.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lhsis/algebra.hpp"
#include "lhsis/dynamics.hpp"
#include "lhsis/error.hpp"
#include "lhsis/ode.hpp"
#include "lhsis/transform.hpp"

namespace lhsis {

using Pair = std::array<double, 2>;

struct ProlongedState {
  ChartId chart = ChartId::Cartesian;
  std::vector<Pair> copies;
};

enum class Branch { Plus, Minus };

inline const char* to_string(Branch b) { return b == Branch::Plus ? "+" : "-"; }

/// Significant constants. h4 fills k1, k, k2, k3 and B; h6 fills the signed
/// k1, k2 and k4.
struct MotionConstants {
  AlgebraId algebra = AlgebraId::H4;
  double k1 = 0.0;
  double k = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double B = 0.0;
  bool usable = true;
};

namespace detail {

inline Pair cartesian_of(const Pair& c, ChartId chart) {
  if (chart == ChartId::Cartesian) return c;
  return epi_to_cart(c[0], c[1]);
}

inline std::vector<Pair> cartesian_copies(const ProlongedState& s) {
  std::vector<Pair> out;
  out.reserve(s.copies.size());
  for (const auto& c : s.copies) out.push_back(cartesian_of(c, s.chart));
  return out;
}

inline double cross_diff(const Pair& a, const Pair& b) { return (a[0] - b[0]) * (a[1] - b[1]); }

inline double signed_area(const Pair& a, const Pair& b, const Pair& c) {
  return a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]);
}

inline void require_copies(const ProlongedState& s, std::size_t lo, std::size_t hi, const char* what) {
  if (s.copies.size() < lo || s.copies.size() > hi) {
    throw DomainError(std::string(what) + ": expected " + std::to_string(lo) + "-" + std::to_string(hi) +
                      " copies, got " + std::to_string(s.copies.size()));
  }
}

// (k - 2(k1 + k3))^2 - 4 k1 k3, with rounding-level negatives clamped to 0.
inline double h4_radicand(double k1, double k, double k3) {
  const double m = k - 2.0 * (k1 + k3);
  const double r = m * m - 4.0 * k1 * k3;
  const double scale = std::max({m * m, std::abs(4.0 * k1 * k3), 1e-300});
  if (r < 0.0 && r > -1e-12 * scale) return 0.0;
  return r;
}

inline double h4_discriminant(double k1, double k, double k3) {
  const double r = h4_radicand(k1, k, k3);
  if (r < 0.0) throw DomainError("negative discriminant in the h4 superposition rule");
  return std::sqrt(r);
}

// With m = k - 2(k1 + k3) the rule reads x1 = x3 + (m + 2k3 +- B)/(2(y2 - y3)),
// or equivalently x1 = x2 + (m +- B)/(2(y2 - y3)); likewise for y1 with the
// opposite sign of B. Each coordinate is anchored at whichever particular
// needs the smaller correction, so coincident configurations come out exact.
template <class T>
std::array<T, 2> h4_combine(const std::array<T, 2>& s2, const std::array<T, 2>& s3, double m, double k3, double B,
                            Branch branch) {
  const T sB = branch == Branch::Plus ? T(B) : -T(B);
  auto pick = [&](T base2, T base3, T num2, T den) {
    const T num3 = num2 + 2 * T(k3);
    return std::abs(num2) <= std::abs(num3) ? base2 + num2 / (2 * den) : base3 + num3 / (2 * den);
  };
  return {pick(s2[0], s3[0], T(m) + sB, s2[1] - s3[1]), pick(s2[1], s3[1], T(m) - sB, s2[0] - s3[0])};
}

inline Pair h4_cartesian(const Pair& s2, const Pair& s3, double k1, double k, Branch branch) {
  if (s2[1] == s3[1]) throw DomainError("degenerate particular solutions: y2 = y3");
  if (s2[0] == s3[0]) throw DomainError("degenerate particular solutions: x2 = x3");
  const double k3 = cross_diff(s3, s2);
  const double B = h4_discriminant(k1, k, k3);
  return h4_combine<double>(s2, s3, k - 2.0 * (k1 + k3), k3, B, branch);
}

using Wide = long double;
using WidePair = std::array<Wide, 2>;

inline WidePair wide_image(const Pair& e) {
  require_regular_epidemic(e[0], e[1]);
  return epi_map<Wide>(e[0], e[1]);
}

// Maps an extended-precision Cartesian result back to the epidemic chart.
inline Pair epidemic_image(Wide u, Wide v) {
  if (std::abs(u) < kPoleGuard) throw SingularPointError("superposed state has no epidemic image (x = 0)");
  const auto e = cart_map<Wide>(u, v);
  if (std::abs(e[1] * u) < kPoleGuard) throw SingularPointError("superposed state has no epidemic image (x^2y^2 = 1)");
  const Pair out{static_cast<double>(e[0]), static_cast<double>(e[1])};
  require_regular_epidemic(out[0], out[1]);
  return out;
}

// The epidemic-chart rule with each particular solution entering through
// X(q,p) = (q^2p^2-1)/p and Y(q,p) = qp^2/(q^2p^2-1). The discriminant uses
// the same double images as extract_constants; the combination itself is
// carried in extended precision since it cancels when one particular
// dominates.
inline Pair h4_epidemic(const Pair& e2, const Pair& e3, double k1, double k, Branch branch) {
  const Pair c2 = epi_to_cart(e2[0], e2[1]);
  const Pair c3 = epi_to_cart(e3[0], e3[1]);
  if (c2[1] == c3[1]) throw DomainError("degenerate particular solutions: y2 = y3");
  if (c2[0] == c3[0]) throw DomainError("degenerate particular solutions: x2 = x3");
  const double k3 = cross_diff(c3, c2);
  const double B = h4_discriminant(k1, k, k3);
  const auto r = h4_combine<Wide>(wide_image(e2), wide_image(e3), k - 2.0 * (k1 + k3), k3, B, branch);
  const Wide u = r[0], v = r[1];
  return epidemic_image(u, v);
}

struct H6Weights {
  double w2, w3, w4;
};

inline H6Weights h6_weights(double k1, double k2, double k4) {
  if (k4 == 0.0) throw DomainError("collinear particular solutions: k4 = 0");
  return {1.0 + (k2 - k1) / k4, -k2 / k4, k1 / k4};
}

}  // namespace detail

/// F^(level) for the oscillator (h4) or two-photon (h6) prolongation.
///
/// h4 accepts 2 or 3 copies, h6 3 or 4; level may not exceed the copy count.
/// The low levels that vanish identically (h4: 1, h6: 1 and 2) return 0.
inline double motion_constant(AlgebraId id, int level, const ProlongedState& s) {
  if (id == AlgebraId::B2) throw DomainError("b2 admits no Casimir; use the h4 constants with b1 = 0");
  if (id == AlgebraId::H4) {
    detail::require_copies(s, 2, 3, "h4 constants");
  } else {
    detail::require_copies(s, 3, 4, "h6 constants");
  }
  if (level < 1 || static_cast<std::size_t>(level) > s.copies.size()) {
    throw DomainError("level " + std::to_string(level) + " is not available with " +
                      std::to_string(s.copies.size()) + " copies");
  }
  const auto c = detail::cartesian_copies(s);
  if (id == AlgebraId::H4) {
    if (level == 1) return 0.0;
    if (level == 2) return detail::cross_diff(c[0], c[1]);
    return detail::cross_diff(c[0], c[1]) + detail::cross_diff(c[0], c[2]) + detail::cross_diff(c[1], c[2]);
  }
  if (level <= 2) return 0.0;
  const double s123 = detail::signed_area(c[0], c[1], c[2]);
  if (level == 3) return s123 * s123;
  const double s124 = detail::signed_area(c[0], c[1], c[3]);
  const double s134 = detail::signed_area(c[0], c[2], c[3]);
  const double s234 = detail::signed_area(c[1], c[2], c[3]);
  return s123 * s123 + s124 * s124 + s134 * s134 + s234 * s234;
}

/// The four signed two-photon expressions whose squares are F^(3), F_34, F_24
/// and F_14, in that order.
inline std::array<double, 4> signed_h6_expressions(const ProlongedState& s) {
  detail::require_copies(s, 4, 4, "signed h6 expressions");
  const auto c = detail::cartesian_copies(s);
  return {detail::signed_area(c[0], c[1], c[2]), detail::signed_area(c[0], c[1], c[3]),
          detail::signed_area(c[0], c[2], c[3]), detail::signed_area(c[1], c[2], c[3])};
}

/// The same invariant obtained from the Casimir evaluated on the summed
/// Hamiltonian functions of the first `level` copies.
inline double coalgebra_constant(AlgebraId id, int level, const ProlongedState& s) {
  if (id == AlgebraId::B2) throw DomainError("b2 admits no Casimir");
  if (level < 1 || static_cast<std::size_t>(level) > s.copies.size()) {
    throw DomainError("level exceeds the number of copies");
  }
  GeneratorVector v{};
  for (int m = 0; m < level; ++m) {
    const auto& c = s.copies[static_cast<std::size_t>(m)];
    const auto h = hamiltonian_values(id, PhaseState{s.chart, c[0], c[1]});
    for (int i = 0; i < kGeneratorSlots; ++i) v[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(i)];
  }
  return casimir_value(id, v);
}

/// F^(2) with copies i and j (1-based) exchanged.
inline double permuted_constant(AlgebraId id, int i, int j, const ProlongedState& s) {
  if (id != AlgebraId::H4) throw DomainError("permuted constants are defined for h4");
  detail::require_copies(s, 3, 3, "permuted constant");
  if (i == j || i < 1 || j < 1 || i > 3 || j > 3) {
    throw DomainError("invalid index pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  auto swap = [&](int n) { return n == i ? j : (n == j ? i : n); };
  const auto c = detail::cartesian_copies(s);
  return detail::cross_diff(c[static_cast<std::size_t>(swap(1) - 1)], c[static_cast<std::size_t>(swap(2) - 1)]);
}

/// x_a(y_b - y_c) + x_b(y_c - y_a) + x_c(y_a - y_b), taken in Cartesian coordinates.
inline double signed_k_h6(const Pair& a, const Pair& b, const Pair& c, ChartId chart = ChartId::Cartesian) {
  return detail::signed_area(detail::cartesian_of(a, chart), detail::cartesian_of(b, chart),
                             detail::cartesian_of(c, chart));
}

/// Reconstructs the general solution from two particular solutions and the
/// constants k1 = F^(2), k = F^(3).
inline Pair superpose_h4(const Pair& sol2, const Pair& sol3, double k1, double k, Branch branch,
                         ChartId chart = ChartId::Cartesian) {
  return chart == ChartId::Cartesian ? detail::h4_cartesian(sol2, sol3, k1, k, branch)
                                     : detail::h4_epidemic(sol2, sol3, k1, k, branch);
}

/// Reconstructs the general solution from three particular solutions and the
/// signed constants k1, k2.
inline Pair superpose_h6(const Pair& sol2, const Pair& sol3, const Pair& sol4, double k1, double k2,
                         ChartId chart = ChartId::Cartesian) {
  if (chart == ChartId::Cartesian) {
    const auto w = detail::h6_weights(k1, k2, signed_k_h6(sol2, sol3, sol4));
    return {w.w2 * sol2[0] + w.w3 * sol3[0] + w.w4 * sol4[0], w.w2 * sol2[1] + w.w3 * sol3[1] + w.w4 * sol4[1]};
  }
  const double k4 = signed_k_h6(sol2, sol3, sol4, chart);
  if (k4 == 0.0) throw DomainError("collinear particular solutions: k4 = 0");
  using W = detail::Wide;
  const auto c2 = detail::wide_image(sol2), c3 = detail::wide_image(sol3), c4 = detail::wide_image(sol4);
  const W w2 = 1 + (W(k2) - W(k1)) / k4, w3 = -W(k2) / k4, w4 = W(k1) / k4;
  return detail::epidemic_image(w2 * c2[0] + w3 * c3[0] + w4 * c4[0], w2 * c2[1] + w3 * c3[1] + w4 * c4[1]);
}

/// Picks the h4 branch reproducing the anchor. Coincident branches give Plus.
inline Branch resolve_branch_h4(const Pair& anchor, const Pair& sol2, const Pair& sol3, double k1, double k,
                                ChartId chart = ChartId::Cartesian, double tol = 1e-6) {
  const Pair a = detail::cartesian_of(anchor, chart);
  const Pair s2 = detail::cartesian_of(sol2, chart);
  const Pair s3 = detail::cartesian_of(sol3, chart);
  const double B = detail::h4_discriminant(k1, k, detail::cross_diff(s3, s2));
  auto dist = [&](Branch b) {
    const Pair r = detail::h4_cartesian(s2, s3, k1, k, b);
    return std::max(std::abs(r[0] - a[0]) / std::max(1.0, std::abs(a[0])),
                    std::abs(r[1] - a[1]) / std::max(1.0, std::abs(a[1])));
  };
  const double dp = dist(Branch::Plus);
  if (B == 0.0) {
    if (dp > tol) throw DomainError("no h4 branch reproduces the anchor");
    return Branch::Plus;
  }
  const double dm = dist(Branch::Minus);
  if (std::min(dp, dm) > tol) throw DomainError("no h4 branch reproduces the anchor");
  return dm < dp ? Branch::Minus : Branch::Plus;
}

/// Evaluates the significant constants from one time sample of the general
/// solution and the particular solutions (2 for h4, 3 for h6).
inline MotionConstants extract_constants(AlgebraId id, const Pair& general, const std::vector<Pair>& particulars,
                                         ChartId chart = ChartId::Cartesian) {
  MotionConstants m;
  m.algebra = id;
  const Pair g = detail::cartesian_of(general, chart);
  if (id == AlgebraId::H4) {
    if (particulars.size() != 2) throw DomainError("h4 superposition needs 2 particular solutions");
    const Pair s2 = detail::cartesian_of(particulars[0], chart);
    const Pair s3 = detail::cartesian_of(particulars[1], chart);
    m.k1 = detail::cross_diff(g, s2);
    m.k2 = detail::cross_diff(g, s3);
    m.k3 = detail::cross_diff(s3, s2);
    m.k = m.k1 + m.k2 + m.k3;
    const double r = detail::h4_radicand(m.k1, m.k, m.k3);
    m.usable = r >= 0.0 && s2[0] != s3[0] && s2[1] != s3[1];
    m.B = r >= 0.0 ? std::sqrt(r) : std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  if (id == AlgebraId::H6) {
    if (particulars.size() != 3) throw DomainError("h6 superposition needs 3 particular solutions");
    const Pair s2 = detail::cartesian_of(particulars[0], chart);
    const Pair s3 = detail::cartesian_of(particulars[1], chart);
    const Pair s4 = detail::cartesian_of(particulars[2], chart);
    m.k1 = detail::signed_area(g, s2, s3);
    m.k2 = detail::signed_area(g, s2, s4);
    m.k4 = detail::signed_area(s2, s3, s4);
    m.usable = m.k4 != 0.0;
    return m;
  }
  throw DomainError("b2 has no superposition rule of its own; use h4 with b1 = 0");
}

/// Integrates every copy of the diagonal prolongation as one coupled system.
inline std::vector<ProlongedState> integrate_prolonged(const SystemSpec& spec, const ProlongedState& s0, double t0,
                                                       const std::vector<double>& times, double tol) {
  if (!(tol > 0.0)) throw DomainError("integration tolerance must be positive");
  const ChartId chart = spec.chart();
  const std::size_t m = s0.copies.size();
  ode::State y0(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const PhaseState p = to_chart(PhaseState{s0.chart, s0.copies[i][0], s0.copies[i][1]}, chart);
    if (chart == ChartId::Epidemic) require_regular_epidemic(p.first, p.second);
    y0[2 * i] = p.first;
    y0[2 * i + 1] = p.second;
  }
  auto f = [&](double t, const ode::State& y, ode::State& dy) {
    for (std::size_t i = 0; i < m; ++i) {
      const Tangent d = rhs(spec, t, PhaseState{chart, y[2 * i], y[2 * i + 1]});
      dy[2 * i] = d[0];
      dy[2 * i + 1] = d[1];
    }
  };
  ode::Options opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol;
  const auto ys = ode::integrate_dense(f, t0, y0, times, opt);
  std::vector<ProlongedState> out;
  out.reserve(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    ProlongedState s{chart, {}};
    for (std::size_t i = 0; i < m; ++i) {
      if (chart == ChartId::Epidemic && !is_regular_epidemic(ys[k][2 * i], ys[k][2 * i + 1])) {
        throw IntegrationError("singular state encountered", times[k]);
      }
      s.copies.push_back({ys[k][2 * i], ys[k][2 * i + 1]});
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace lhsis
