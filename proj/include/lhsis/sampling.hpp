#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "lhsis/transform.hpp"

namespace lhsis {

/// Deterministic source of uniforms. mt19937_64 is fully specified by the
/// standard and the conversion below is explicit, so streams are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double sign() { return gen_() & 1 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 gen_;
};

struct EpidemicBox {
  double q_max = 5.0;
  double p_min = 0.1;
  double p_max = 5.0;
  double pole_margin = 1e-3;  // lower bound on |q^2 p^2 - 1|
};

struct CartesianBox {
  double x_min = 0.1;  // lower bound on |x|
  double x_max = 5.0;
  double y_max = 5.0;
  double pole_margin = 1e-3;  // lower bound on |x^2 y^2 - 1|
};

inline PhaseState random_epidemic(Rng& rng, const EpidemicBox& box = {}) {
  for (;;) {
    const double q = rng.uniform(-box.q_max, box.q_max);
    const double p = rng.sign() * rng.uniform(box.p_min, box.p_max);
    if (std::abs(q * q * p * p - 1.0) > box.pole_margin) return PhaseState::epidemic(q, p);
  }
}

inline PhaseState random_cartesian(Rng& rng, const CartesianBox& box = {}) {
  for (;;) {
    const double x = rng.sign() * rng.uniform(box.x_min, box.x_max);
    const double y = rng.uniform(-box.y_max, box.y_max);
    if (std::abs(x * x * y * y - 1.0) > box.pole_margin) return PhaseState::cartesian(x, y);
  }
}

inline PhaseState random_point(Rng& rng, ChartId chart) {
  return chart == ChartId::Epidemic ? random_epidemic(rng) : random_cartesian(rng);
}

/// |a - b| / max(1, |b|): relative for large values, absolute near zero.
inline double scaled_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace lhsis
