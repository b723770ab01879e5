#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lhsis/error.hpp"

namespace lhsis::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Kronrod abscissae on [0,1); odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double value;
  double error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod15(F& f, double a, double b, int depth, int& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double absolute = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    absolute += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  evaluations += 15;
  if (!std::isfinite(kronrod)) {
    throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  double err = std::abs((kronrod - gauss) * half);
  // Differences below the rounding level of the panel cannot be resolved.
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * absolute * std::abs(half);
  if (err <= roundoff) err = 0.0;
  return {a, b, kronrod * half, err, depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7,15) quadrature of f over [a,b].
///
/// The worst panel is bisected until the summed |K15 - G7| estimate falls below
/// max(abs_tol, rel_tol * |value|). Panels at max_depth are never split; if the
/// tolerance cannot be met without splitting one, QuadratureError is thrown.
/// Reversed bounds return the negated integral.
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return {};
  if (a > b) {
    Result r = integrate(f, b, a, abs_tol, rel_tol, max_depth);
    r.value = -r.value;
    return r;
  }

  Result out;
  std::vector<detail::Segment> open;  // max-heap on error
  std::vector<detail::Segment> done;
  std::vector<detail::Segment> all;
  open.push_back(detail::gauss_kronrod15(f, a, b, 0, out.evaluations));

  for (;;) {
    // Summing in order of position keeps the total reproducible for a given panel set.
    all.assign(done.begin(), done.end());
    all.insert(all.end(), open.begin(), open.end());
    std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    double value = 0.0, error = 0.0;
    for (const auto& s : all) {
      value += s.value;
      error += s.error;
    }
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
      out.value = value;
      out.error = error;
      return out;
    }

    while (!open.empty() && (open.front().depth >= max_depth || open.front().error == 0.0)) {
      std::pop_heap(open.begin(), open.end());
      done.push_back(open.back());
      open.pop_back();
    }
    if (open.empty()) {
      throw QuadratureError("tolerance not reached within subdivision depth " +
                            std::to_string(max_depth) + " on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "] (error estimate " + std::to_string(error) +
                            ")");
    }
    std::pop_heap(open.begin(), open.end());
    const detail::Segment worst = open.back();
    open.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    for (const auto& half : {detail::gauss_kronrod15(f, worst.a, mid, worst.depth + 1, out.evaluations),
                             detail::gauss_kronrod15(f, mid, worst.b, worst.depth + 1, out.evaluations)}) {
      open.push_back(half);
      std::push_heap(open.begin(), open.end());
    }
  }
}

}  // namespace lhsis::quadrature
