#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace lhsis::numdiff {

/// eps^(1/5) times the length scale, balancing rounding against the O(h^4)
/// error of central() below.
template <class T = double>
T step_for(double scale) {
  static const T root = std::pow(std::numeric_limits<T>::epsilon(), T(0.2));
  return root * static_cast<T>(scale);
}

/// Central difference at steps h and h/2 combined by one Richardson
/// extrapolation, so the truncation error is O(h^4).
///
/// g(offset) returns std::array<T, N>, the function at x + offset.
template <class T, class G>
auto central(G&& g, T h) {
  const auto p1 = g(h), m1 = g(-h), p2 = g(h / 2), m2 = g(-h / 2);
  auto out = p1;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const T d1 = (p1[k] - m1[k]) / (2 * h);
    const T d2 = (p2[k] - m2[k]) / h;
    out[k] = (4 * d2 - d1) / 3;
  }
  return out;
}

template <class T, class G>
T central_scalar(G&& g, T h) {
  return central([&](T o) { return std::array<T, 1>{g(o)}; }, h)[0];
}

}  // namespace lhsis::numdiff
