#pragma once

// Dormand-Prince 5(4) embedded pair with PI step-size control and the
// 4th-order continuous extension of Hairer, Norsett & Wanner (DOPRI5).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lhsis/error.hpp"

namespace lhsis::ode {

using State = std::vector<double>;

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double initial_step = 0.0;  // 0 selects automatically
  long max_steps = 1'000'000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace detail

/// Integrates y' = f(t, y) from (t0, y0) and returns the state at each of the
/// requested times, which must be monotone in the direction of integration.
///
/// f has the signature void(double t, const State& y, State& dydt).
/// Throws IntegrationError on step-size underflow; exceptions thrown by f are
/// reported as IntegrationError carrying the time of the failing step.
template <class Rhs>
std::vector<State> integrate_dense(Rhs&& f, double t0, const State& y0, std::span<const double> times,
                                   const Options& opt = {}, Stats* stats = nullptr) {
  using namespace detail;
  const std::size_t n = y0.size();
  std::vector<State> out;
  out.reserve(times.size());
  if (times.empty()) return out;

  const double t_end = times.back();
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double prev = i == 0 ? t0 : times[i - 1];
    if (dir * (times[i] - prev) < 0.0) throw DomainError("requested times are not monotone");
  }

  Stats local;
  Stats& st = stats ? *stats : local;
  double t = t0;
  State y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  std::array<State, 5> cont;
  for (auto& c : cont) c.resize(n);

  auto call = [&](double tt, const State& yy, State& dy) {
    try {
      f(tt, yy, dy);
    } catch (const IntegrationError&) {
      throw;
    } catch (const Error& e) {
      throw IntegrationError(std::string("singular state encountered: ") + e.what(), tt);
    }
    ++st.evaluations;
  };

  std::size_t next = 0;
  while (next < times.size() && times[next] == t0) {
    out.push_back(y);
    ++next;
  }
  if (next == times.size()) return out;

  auto norm = [&](const State& v, const State& ya, const State& yb) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(n, 1)));
  };

  call(t, y, k1);

  double h = opt.initial_step;
  if (h <= 0.0) {
    const double dnf = norm(k1, y, y), dny = norm(y, y, y);
    double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h0 = std::min(h0, std::abs(t_end - t0));
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dir * h0 * k1[i];
    call(t + dir * h0, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) err[i] = (k2[i] - k1[i]) / h0;
    const double der2 = norm(err, y, y);
    const double der = std::max(der2, dnf);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = dir * std::min(std::abs(h), std::abs(t_end - t0));

  constexpr double safe = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  const double expo1 = 0.2 - beta * 0.75;
  double fac_old = 1e-4;
  bool last_rejected = false;

  while (next < times.size()) {
    if (st.accepted + st.rejected >= opt.max_steps) throw IntegrationError("maximum number of steps exceeded", t);
    if (std::abs(h) <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw IntegrationError("step size underflow", t);
    }
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    call(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    call(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    call(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    call(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = t + h;
    call(t_new, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    call(t_new, ynew, k7);
    for (std::size_t i = 0; i < n; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    double e = norm(err, y, ynew);
    if (!std::isfinite(e)) e = 1e10;
    const double fac11 = std::pow(e, expo1);

    if (e <= 1.0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k7[i] - bspl;
        cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      const double t_old = t;
      while (next < times.size() && dir * (times[next] - t_new) <= 0.0) {
        State yi(n);
        if (times[next] == t_new) {
          yi = ynew;
        } else {
          const double s = (times[next] - t_old) / h, s1 = 1.0 - s;
          for (std::size_t i = 0; i < n; ++i)
            yi[i] = cont[0][i] + s * (cont[1][i] + s1 * (cont[2][i] + s * (cont[3][i] + s1 * cont[4][i])));
        }
        out.push_back(std::move(yi));
        ++next;
      }
      ++st.accepted;
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      fac_old = std::max(e, 1e-4);
      double fac = fac11 / std::pow(fac_old, beta);
      fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
      double h_new = h / fac;
      if (last_rejected) h_new = dir * std::min(std::abs(h_new), std::abs(h));
      last_rejected = false;
      h = h_new;
    } else {
      ++st.rejected;
      h = h / std::min(1.0 / fac_min, fac11 / safe);
      last_rejected = true;
    }
  }
  return out;
}

}  // namespace lhsis::ode
