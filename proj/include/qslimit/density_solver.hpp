#pragma once

// Density route: successive substitution in
//   f(x) = int_0^1 f_u(x) du,
//   f_u(x) = (1/u) int f(y) f((x - g(u) - (1-u) y) / u) dy.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qslimit/cf_solver.hpp"
#include "qslimit/grid.hpp"
#include "qslimit/parallel.hpp"
#include "qslimit/quadrature.hpp"
#include "qslimit/special.hpp"

namespace qslimit {

/// Probability density sampled on a uniform grid covering at least [-2, 4].
class DensityGrid {
 public:
  explicit DensityGrid(RealGrid grid) : grid_(std::move(grid)) {
    if (grid_.size() < 3)
      throw std::invalid_argument("density grid needs at least 3 points");
    if (grid_.origin() > -2.0 || grid_.last_point() < 4.0 - 1e-9)
      throw std::invalid_argument("density grid must cover [-2, 4]");
    for (double v : grid_.values())
      if (v < 0.0) throw std::invalid_argument("density values must be >= 0");
    const double m = mass();
    if (m < 0.99 || m > 1.01)
      throw std::invalid_argument("density mass " + std::to_string(m) +
                                  " outside [0.99, 1.01]");
  }

  const RealGrid& grid() const noexcept { return grid_; }
  double x_min() const noexcept { return grid_.origin(); }
  double x_max() const noexcept { return grid_.last_point(); }
  double dx() const noexcept { return grid_.spacing(); }
  std::size_t size() const noexcept { return grid_.size(); }
  double operator[](std::size_t i) const noexcept { return grid_[i]; }

  double mass() const { return trapezoid(grid_); }
  double moment(int k) const { return weighted_sum([k](double x) { return std::pow(x, k); }); }
  double mean() const { return moment(1) / mass(); }
  double variance() const {
    const double mu = mean();
    return weighted_sum([mu](double x) { return (x - mu) * (x - mu); }) / mass();
  }
  double max_value() const {
    return *std::max_element(grid_.values().begin(), grid_.values().end());
  }
  double min_value() const {
    return *std::min_element(grid_.values().begin(), grid_.values().end());
  }

  template <typename W>
  double weighted_sum(W&& w) const {
    const std::size_t n = grid_.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      s += wt * w(grid_.point(i)) * grid_[i];
    }
    return s * grid_.spacing();
  }

 private:
  RealGrid grid_;
};

inline DensityGrid density_from_function(double x_min, double x_max, double dx,
                                         const std::function<double(double)>& f) {
  const std::size_t n = points_in(x_min, x_max, dx);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(x_min + static_cast<double>(i) * dx);
  return DensityGrid(RealGrid(x_min, dx, std::move(v)));
}

/// Mean-zero Gaussian with the limit variance.
inline DensityGrid init_gaussian_density(double x_min = -4.0, double x_max = 6.0,
                                         double dx = 0.005) {
  const double s2 = kLimitVariance;
  return density_from_function(x_min, x_max, dx, [s2](double x) {
    return std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * std::numbers::pi * s2);
  });
}

/// Uniform density on [lo, hi] (renormalised on the grid).
inline DensityGrid init_uniform_density(double lo, double hi, double x_min = -4.0,
                                        double x_max = 6.0, double dx = 0.005) {
  const std::size_t n = points_in(x_min, x_max, dx);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x_min + static_cast<double>(i) * dx;
    v[i] = (x >= lo && x <= hi) ? 1.0 : 0.0;
  }
  RealGrid raw(x_min, dx, v);
  const double m = trapezoid(raw);
  for (double& e : v) e /= m;
  return DensityGrid(RealGrid(x_min, dx, std::move(v)));
}

/// Bound on f_u from sup f <= 16 and f_u = f_{1-u}.
inline constexpr double kFuCeiling = 32.0;

struct DensityMapStats {
  double mass_before_normalization = 0.0;
  std::size_t clipped = 0;  // f_u values above 32 (never expected)
};

struct DensityMapOptions {
  int u_nodes = 64;
  bool renormalize = true;
};

/// One sweep of the integral-equation map. Nodes u are Gauss-Legendre points
/// on (0, 1/2), doubled through f_u = f_{1-u}. Each f_u is evaluated in the
/// equivalent form (1/(1-u)) int f(w) f((x - g(u) - u w) / (1-u)) dw, whose
/// inner argument is never compressed by more than a factor 2, so the
/// trapezoid rule in w stays accurate for small u. Off-grid reads of f are 0.
inline DensityGrid apply_T(const DensityGrid& f, const DensityMapOptions& opt = {},
                           DensityMapStats* stats = nullptr) {
  if (opt.u_nodes < 8) throw std::invalid_argument("apply_T: need u_nodes >= 8");
  const std::size_t n = f.size();
  const double x0 = f.x_min();
  const double dx = f.dx();
  const auto vals = f.grid().values();

  std::vector<double> un, uw;
  gauss_legendre(opt.u_nodes, 0.0, 0.5, un, uw);

  std::vector<double> fw(n);  // f(w_j) times trapezoid weight
  for (std::size_t j = 0; j < n; ++j)
    fw[j] = vals[j] * ((j == 0 || j + 1 == n) ? 0.5 * dx : dx);

  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> clipped_per_x(n, 0);
  const double last = static_cast<double>(n - 1);
  parallel_for(n, [&](std::size_t i) {
    const double x = x0 + static_cast<double>(i) * dx;
    double acc = 0.0;
    for (std::size_t k = 0; k < un.size(); ++k) {
      const double u = un[k];
      const double v = 1.0 - u;
      const double gu = g_func(u);
      // grid position of (x - g - u w_j) / v is a - b j
      const double a = ((x - gu - u * x0) / v - x0) / dx;
      const double b = u / v;
      // indices with 0 <= a - b j <= n - 1
      const double jlo_d = std::ceil((a - last) / b);
      const double jhi_d = std::floor(a / b);
      const auto jlo = static_cast<std::ptrdiff_t>(std::max(0.0, jlo_d));
      const auto jhi = static_cast<std::ptrdiff_t>(std::min(last, jhi_d));
      double s = 0.0;
      for (std::ptrdiff_t j = jlo; j <= jhi; ++j) {
        const double pos = a - b * static_cast<double>(j);
        auto m = static_cast<std::size_t>(pos);
        if (m >= n - 1) m = n - 2;
        const double r = pos - static_cast<double>(m);
        s += fw[static_cast<std::size_t>(j)] *
             ((1.0 - r) * vals[m] + r * vals[m + 1]);
      }
      double fu = s / v;
      if (fu > kFuCeiling * (1.0 + 1e-6)) {
        fu = kFuCeiling * (1.0 + 1e-6);
        ++clipped_per_x[i];
      }
      acc += 2.0 * uw[k] * fu;
    }
    out[i] = acc;
  });

  RealGrid raw(x0, dx, out);
  const double m = trapezoid(raw);
  if (m < 0.9 || m > 1.1)
    throw std::runtime_error("apply_T: mass " + std::to_string(m) +
                             " before renormalisation; widen the grid");
  if (stats) {
    stats->mass_before_normalization = m;
    stats->clipped = 0;
    for (auto c : clipped_per_x) stats->clipped += c;
  }
  if (opt.renormalize)
    for (double& e : out) e /= m;
  return DensityGrid(RealGrid(x0, dx, std::move(out)));
}

struct DensityIteration {
  DensityGrid f;
  int iterations;
  std::vector<double> diff_history;
  std::vector<double> masses;  // before renormalisation
  std::size_t clipped = 0;
  std::optional<std::string> warning;
};

class DensityNonConvergence : public std::runtime_error {
 public:
  DensityNonConvergence(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Geometric rate over the last `span` steps of a diff history.
inline double tail_ratio(const std::vector<double>& h, std::size_t span = 5) {
  if (h.size() < 2) return 0.0;
  const std::size_t s = std::min(span, h.size() - 1);
  const double a = h[h.size() - 1 - s];
  const double b = h.back();
  if (a <= 0.0) return 0.0;
  return std::pow(b / a, 1.0 / static_cast<double>(s));
}

inline DensityIteration iterate_density(const DensityGrid& f0, int max_iter,
                                        double tol,
                                        const DensityMapOptions& opt = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("iterate_density: tol must be > 0");
  DensityGrid cur = f0;
  std::vector<double> history, masses;
  std::size_t clipped = 0;
  for (int it = 1; it <= max_iter; ++it) {
    DensityMapStats st;
    DensityGrid next = apply_T(cur, opt, &st);
    masses.push_back(st.mass_before_normalization);
    clipped += st.clipped;
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      diff = std::max(diff, std::abs(next[i] - cur[i]));
    history.push_back(diff);
    cur = std::move(next);
    if (diff < tol) {
      DensityIteration r{std::move(cur), it, std::move(history), std::move(masses),
                         clipped, std::nullopt};
      const double ratio = tail_ratio(r.diff_history);
      if (!(ratio < 0.95))
        r.warning = "diff history not geometrically decreasing (ratio " +
                    std::to_string(ratio) + ")";
      if (clipped > 0)
        r.warning = std::to_string(clipped) + " f_u values exceeded 32";
      return r;
    }
  }
  throw DensityNonConvergence("iterate_density: no convergence within " +
                                  std::to_string(max_iter) + " iterations",
                              std::move(history));
}

/// Cumulative trapezoid integral, clamped to [0, 1].
inline RealGrid cdf(const DensityGrid& f) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    F[i] = F[i - 1] + 0.5 * f.dx() * (f[i - 1] + f[i]);
  for (double& e : F) e = std::clamp(e, 0.0, 1.0);
  return RealGrid(f.x_min(), f.dx(), std::move(F));
}

/// x where the CDF first reaches the given level (linear between nodes).
inline double quantile(const RealGrid& F, double level) {
  for (std::size_t i = 1; i < F.size(); ++i) {
    if (F[i] >= level) {
      const double d = F[i] - F[i - 1];
      const double r = d > 0.0 ? (level - F[i - 1]) / d : 0.0;
      return F.point(i - 1) + r * F.spacing();
    }
  }
  return F.last_point();
}

inline double mgf_estimate(const DensityGrid& f, double lambda) {
  if (!(std::abs(lambda) <= 2.0))
    throw std::domain_error("mgf_estimate: |lambda| must be <= 2");
  return f.weighted_sum([lambda](double x) { return std::exp(lambda * x); });
}

/// True iff every grid value in [lo, hi] exceeds threshold.
inline bool positivity_check(const DensityGrid& f, double threshold = 0.0,
                             double lo = -std::numeric_limits<double>::infinity(),
                             double hi = std::numeric_limits<double>::infinity()) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.grid().point(i);
    if (x < lo || x > hi) continue;
    if (!(f[i] > threshold)) return false;
  }
  return true;
}

}  // namespace qslimit
