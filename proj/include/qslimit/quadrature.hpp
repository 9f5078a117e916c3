#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace qslimit {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  int max_subdivisions = 2000;

  void validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be > 0");
    if (max_subdivisions < 1)
      throw std::invalid_argument("max_subdivisions must be >= 1");
  }
};

/// Thrown when adaptive quadrature cannot meet its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

// 15-point Gauss-Kronrod abscissae and weights (QUADPACK qk15).
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

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gk15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(centre - dx);
    const T f2 = f(centre + dx);
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  return {a, b, kronrod * half, magnitude<T>((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive 7/15 Gauss-Kronrod quadrature: the panel with the
/// largest error estimate is bisected until the summed estimate is within
/// spec.abs_tol. Works for real- and complex-valued integrands.
template <typename F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  spec.validate();
  if (!(a < b)) throw std::invalid_argument("integrate: need a < b");

  std::priority_queue<detail::Panel<T>> panels;
  auto first = detail::gk15<T>(f, a, b);
  T total = first.value;
  double err = first.error;
  panels.push(first);
  int splits = 0;
  // Stop once panels are too narrow for bisection to change anything.
  const double min_width = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(a), std::abs(b));
  while (err > spec.abs_tol) {
    if (splits >= spec.max_subdivisions) {
      throw NonConvergence("quadrature on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "] reached " +
                           std::to_string(splits) +
                           " subdivisions with error estimate " +
                           std::to_string(err));
    }
    auto worst = panels.top();
    if (worst.b - worst.a < min_width) {
      throw NonConvergence("quadrature panel collapsed below resolution");
    }
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++splits;
    // Re-sum periodically so the running total does not accumulate drift.
    if (splits % 64 == 0) {
      auto copy = panels;
      total = T{};
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  return QuadratureResult<T>{total, err, splits};
}

template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_adaptive(std::forward<F>(f), a, b, spec).value;
}

/// Width of the strip cut off each end of (0, 1) for integrands built from g
/// or negative powers of u.
inline constexpr double kUnitEndpointCut = 1e-12;

/// Integrates a bounded integrand over (0, 1) on [eps, 1 - eps]. The dropped
/// strips contribute at most 2*eps*sup|f|, which is folded into the result
/// with the endpoint values.
template <typename F>
auto integrate_unit(F&& f, const QuadratureSpec& spec) {
  constexpr double eps = kUnitEndpointCut;
  auto r = integrate_adaptive(f, eps, 1.0 - eps, spec);
  const auto fl = f(eps);
  const auto fr = f(1.0 - eps);
  r.value += (fl + fr) * eps;
  r.error += eps * (std::abs(fl) + std::abs(fr));
  return r;
}

/// n-point Gauss-Legendre nodes and weights mapped to [a, b].
inline void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                           std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = mid - half * x;
    nodes[n - 1 - i] = mid + half * x;
    weights[i] = weights[n - 1 - i] = half * w;
  }
}

}  // namespace qslimit
