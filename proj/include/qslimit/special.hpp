#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qslimit {

/// Gamma function for x > 0 (Lanczos approximation, g = 7, nine terms),
/// with reflection below 1/2. Relative error is a few ulps on (0, 8].
inline double gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("gamma: argument must be positive and finite");
  constexpr double pi = std::numbers::pi;
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma(1.0 - x));
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const double z = x - 1.0;
  double sum = c[0];
  for (int i = 1; i < 9; ++i) sum += c[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * sum;
}

/// The toll term g(u) = 2u ln u + 2(1-u) ln(1-u) + 1 of the limiting
/// fixed-point identity, extended continuously by g(0) = g(1) = 1.
/// Range on (0, 1) is (1 - 2 ln 2, 1); the two halves are summed in a
/// commutative order so g(u) and g(1-u) agree bitwise whenever 1-(1-u) == u.
inline double g_func(double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("g_func: argument outside [0, 1]");
  const double v = 1.0 - u;
  const double a = u > 0.0 ? 2.0 * u * std::log(u) : 0.0;
  const double b = v > 0.0 ? 2.0 * v * std::log(v) : 0.0;
  return (a + b) + 1.0;
}

/// h_{y,z}(u) = u*y + (1-u)*z + g(u).
inline double h_func(double y, double z, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("h_func: u must lie in (0, 1)");
  return u * y + (1.0 - u) * z + g_func(u);
}

/// Unique zero of d/du h_{y,z}(u) on (0, 1).
inline double h_stationary_point(double y, double z) {
  return 1.0 / (1.0 + std::exp(0.5 * (y - z)));
}

}  // namespace qslimit
