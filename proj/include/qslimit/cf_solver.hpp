#pragma once

// Characteristic-function route to the limiting density: iterate
//   phi(t) = int_0^1 phi(u t) phi((1-u) t) exp(i t g(u)) du
// on a grid over [0, T], then Fourier-invert.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qslimit/grid.hpp"
#include "qslimit/parallel.hpp"
#include "qslimit/quadrature.hpp"
#include "qslimit/special.hpp"

namespace qslimit {

/// Variance of the limit law, 7 - 2 pi^2 / 3.
inline constexpr double kLimitVariance =
    7.0 - 2.0 * std::numbers::pi * std::numbers::pi / 3.0;

/// phi sampled on t = 0, dt, ..., T. phi(0) = 1, |phi| <= 1 + 1e-9;
/// negative t is implied by phi(-t) = conj(phi(t)).
class CfGrid {
 public:
  explicit CfGrid(ComplexGrid grid) : grid_(std::move(grid)) {
    if (grid_.origin() != 0.0)
      throw std::invalid_argument("CfGrid must start at t = 0");
    if (grid_.size() < 2)
      throw std::invalid_argument("CfGrid needs at least two points");
    if (grid_[0] != std::complex<double>(1.0, 0.0))
      throw std::invalid_argument("CfGrid must satisfy phi(0) = 1");
    for (const auto& v : grid_.values())
      if (std::abs(v) > 1.0 + 1e-9)
        throw std::invalid_argument("CfGrid value exceeds modulus 1");
  }

  const ComplexGrid& grid() const noexcept { return grid_; }
  double t_max() const noexcept { return grid_.last_point(); }
  double dt() const noexcept { return grid_.spacing(); }
  std::size_t size() const noexcept { return grid_.size(); }
  std::complex<double> operator[](std::size_t i) const { return grid_[i]; }

  /// Four-point Lagrange interpolation for 0 <= t <= T. The stencil reaches
  /// below t = 0 through conjugate symmetry, which keeps Re(phi) even and
  /// Im(phi) odd at the origin.
  std::complex<double> at(double t) const {
    const std::size_t n = grid_.size();
    const double pos = t / grid_.spacing();
    if (!(pos >= 0.0) || pos > static_cast<double>(n - 1) + 1e-9)
      throw std::out_of_range("CfGrid::at outside [0, T]");
    if (n < 4) return grid_.linear_at(t, grid_[n - 1]);
    auto i = static_cast<std::ptrdiff_t>(pos);
    // stencil i-1 .. i+2, shifted left near the right end
    i = std::min<std::ptrdiff_t>(i, static_cast<std::ptrdiff_t>(n) - 3);
    const double r = pos - static_cast<double>(i);
    auto value = [&](std::ptrdiff_t j) {
      return j < 0 ? std::conj(grid_[static_cast<std::size_t>(-j)])
                   : grid_[static_cast<std::size_t>(j)];
    };
    const double w0 = -r * (r - 1.0) * (r - 2.0) / 6.0;
    const double w1 = (r + 1.0) * (r - 1.0) * (r - 2.0) / 2.0;
    const double w2 = -(r + 1.0) * r * (r - 2.0) / 2.0;
    const double w3 = (r + 1.0) * r * (r - 1.0) / 6.0;
    return w0 * value(i - 1) + w1 * value(i) + w2 * value(i + 1) +
           w3 * value(i + 2);
  }

  /// Mean estimated from Im phi near 0 (Richardson on the first two nodes).
  double mean_estimate() const {
    const double t1 = grid_.point(1);
    const double t2 = grid_.point(2);
    const double a1 = grid_[1].imag() / t1;
    const double a2 = grid_[2].imag() / t2;
    return (4.0 * a1 - a2) / 3.0;
  }

 private:
  ComplexGrid grid_;
};

inline CfGrid cf_from_function(double t_max, std::size_t n,
                               const std::function<std::complex<double>(double)>& phi) {
  if (!(t_max > 0.0) || n < 2)
    throw std::invalid_argument("cf grid needs T > 0 and n >= 2");
  const double dt = t_max / static_cast<double>(n - 1);
  std::vector<std::complex<double>> v(n);
  v[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) v[i] = phi(static_cast<double>(i) * dt);
  return CfGrid(ComplexGrid(0.0, dt, std::move(v)));
}

/// Mean-zero Gaussian with the limit variance.
inline CfGrid init_gaussian_cf(double t_max, std::size_t n) {
  return cf_from_function(t_max, n, [](double t) {
    return std::complex<double>(std::exp(-0.5 * kLimitVariance * t * t), 0.0);
  });
}

/// Mean-zero uniform law with the limit variance.
inline CfGrid init_uniform_cf(double t_max, std::size_t n) {
  const double a = std::sqrt(3.0 * kLimitVariance);
  return cf_from_function(t_max, n, [a](double t) {
    return std::complex<double>(std::sin(a * t) / (a * t), 0.0);
  });
}

/// One application of the functional-equation map.
inline CfGrid cf_map(const CfGrid& phi, const QuadratureSpec& spec) {
  const std::size_t n = phi.size();
  const double dt = phi.dt();
  std::vector<std::complex<double>> out(n);
  out[0] = 1.0;
  parallel_for(n - 1, [&](std::size_t idx) {
    const std::size_t j = idx + 1;
    const double t = static_cast<double>(j) * dt;
    auto integrand = [&](double u) {
      return phi.at(u * t) * phi.at((1.0 - u) * t) *
             std::polar(1.0, t * g_func(u));
    };
    // The integrand is symmetric under u -> 1 - u.
    constexpr double eps = kUnitEndpointCut;
    auto r = integrate_adaptive(integrand, eps, 0.5, spec);
    std::complex<double> v = 2.0 * (r.value + eps * integrand(eps));
    const double m = std::abs(v);
    if (m > 1.0) {
      if (m - 1.0 > 1e-9)
        throw std::runtime_error("cf_map: |phi| overshoot " +
                                 std::to_string(m - 1.0) + " at t = " +
                                 std::to_string(t));
      v /= m;
    }
    out[j] = v;
  });
  return CfGrid(ComplexGrid(0.0, dt, std::move(out)));
}

/// Multiplies by exp(-i mu t) so the represented law has mean zero.
inline CfGrid recenter(const CfGrid& phi) {
  const double mu = phi.mean_estimate();
  std::vector<std::complex<double>> v(phi.grid().values().begin(),
                                      phi.grid().values().end());
  for (std::size_t i = 1; i < v.size(); ++i)
    v[i] *= std::polar(1.0, -mu * phi.grid().point(i));
  return CfGrid(ComplexGrid(0.0, phi.dt(), std::move(v)));
}

struct CfIteration {
  CfGrid phi;
  int iterations;
  double final_diff;
  std::vector<double> diff_history;
};

class CfNonConvergence : public std::runtime_error {
 public:
  CfNonConvergence(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Applies cf_map, re-centred to mean zero after each sweep, until the
/// sup-norm change drops below tol. Translates of a fixed point are fixed
/// points too, so without re-centring discretisation error accumulates in
/// the mean.
inline CfIteration iterate_cf(const CfGrid& init, int max_iter, double tol,
                              const QuadratureSpec& spec = {1e-12, 4000}) {
  if (!(tol > 0.0)) throw std::invalid_argument("iterate_cf: tol must be > 0");
  CfGrid cur = init;
  std::vector<double> history;
  for (int it = 1; it <= max_iter; ++it) {
    CfGrid next = recenter(cf_map(cur, spec));
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      diff = std::max(diff, std::abs(next[i] - cur[i]));
    history.push_back(diff);
    cur = std::move(next);
    if (diff < tol) return {std::move(cur), it, diff, std::move(history)};
  }
  throw CfNonConvergence("iterate_cf: no convergence within " +
                             std::to_string(max_iter) + " iterations",
                         std::move(history));
}

/// Largest t^k |phi(t)| over the last tenth of the grid; a proxy for the
/// truncated tail beyond T.
inline double truncation_indicator(const CfGrid& phi, int k) {
  double worst = 0.0;
  const std::size_t start = phi.size() - phi.size() / 10;
  for (std::size_t i = start; i < phi.size(); ++i) {
    const double t = phi.grid().point(i);
    worst = std::max(worst, std::pow(t, k) * std::abs(phi[i]));
  }
  return worst;
}

inline constexpr double kTruncationTolerance = 1e-6;

/// f^{(k)}(x) = (1/pi) Re int_0^T (-i t)^k e^{-i t x} phi(t) dt by the
/// trapezoidal rule, for x = x_min + i dx, i < count.
inline RealGrid invert_cf(const CfGrid& phi, int k, double x_min, double dx,
                          std::size_t count) {
  if (k < 0) throw std::domain_error("invert_cf: k must be >= 0");
  if (!(dx > 0.0) || count == 0)
    throw std::invalid_argument("invert_cf: bad x grid");
  const double tail = truncation_indicator(phi, k);
  if (tail > kTruncationTolerance)
    throw std::runtime_error(
        "invert_cf: t^k |phi| near T is " + std::to_string(tail) +
        ", above the truncation tolerance; increase T");
  const double dt = phi.dt();
  const std::size_t n = phi.size();
  // (-i t)^k phi(t) with trapezoid weights folded in.
  std::vector<std::complex<double>> weighted(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) * dt;
    std::complex<double> factor = std::pow(std::complex<double>(0.0, -t), k);
    if (k == 0) factor = 1.0;
    const double w = (j == 0 || j + 1 == n) ? 0.5 * dt : dt;
    weighted[j] = w * factor * phi[j];
  }
  std::vector<double> out(count);
  parallel_for(count, [&](std::size_t i) {
    const double x = x_min + static_cast<double>(i) * dx;
    // e^{-i t_j x} by rotation, re-seeded every 64 steps.
    const std::complex<double> step = std::polar(1.0, -dt * x);
    std::complex<double> rot = 1.0;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j % 64 == 0) rot = std::polar(1.0, -static_cast<double>(j) * dt * x);
      s += (rot * weighted[j]).real();
      rot *= step;
    }
    out[i] = s / std::numbers::pi;
  });
  return RealGrid(x_min, dx, std::move(out));
}

}  // namespace qslimit
