#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qslimit {

namespace detail {

template <typename T>
bool all_finite(const std::vector<T>& v) {
  for (const auto& e : v) {
    if constexpr (std::is_same_v<T, std::complex<double>>) {
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    } else {
      if (!std::isfinite(e)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Uniformly spaced samples x0 + i*dx of a function of one real variable.
/// Values are immutable after construction.
template <typename Value>
class UniformGrid {
 public:
  using value_type = Value;

  UniformGrid(double origin, double spacing, std::vector<Value> values)
      : origin_(origin), spacing_(spacing), values_(std::move(values)) {
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
      throw std::invalid_argument("grid spacing must be positive and finite");
    if (!std::isfinite(origin_))
      throw std::invalid_argument("grid origin must be finite");
    if (values_.empty()) throw std::invalid_argument("grid must be non-empty");
    if (!detail::all_finite(values_))
      throw std::invalid_argument("grid values must be finite");
  }

  double origin() const noexcept { return origin_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return values_.size(); }
  double point(std::size_t i) const noexcept {
    return origin_ + static_cast<double>(i) * spacing_;
  }
  double last_point() const noexcept { return point(values_.size() - 1); }

  const Value& operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const Value> values() const noexcept { return values_; }

  /// Piecewise-linear interpolation; `outside` is returned off the grid.
  Value linear_at(double x, Value outside = Value{}) const noexcept {
    const double pos = (x - origin_) / spacing_;
    if (!(pos >= 0.0) || pos > static_cast<double>(values_.size() - 1))
      return outside;
    auto i = static_cast<std::size_t>(pos);
    if (i >= values_.size() - 1) return values_.back();
    const double r = pos - static_cast<double>(i);
    return (1.0 - r) * values_[i] + r * values_[i + 1];
  }

 private:
  double origin_;
  double spacing_;
  std::vector<Value> values_;
};

using RealGrid = UniformGrid<double>;
using ComplexGrid = UniformGrid<std::complex<double>>;

/// Evenly spaced points covering [lo, hi] with the given spacing; the last
/// point is the largest lo + i*dx not exceeding hi (up to rounding).
inline std::size_t points_in(double lo, double hi, double dx) {
  if (!(hi > lo) || !(dx > 0.0))
    throw std::invalid_argument("need lo < hi and dx > 0");
  return static_cast<std::size_t>(std::floor((hi - lo) / dx + 1e-9)) + 1;
}

/// Composite trapezoid integral of the grid values.
inline double trapezoid(const RealGrid& g) {
  if (g.size() < 2) return 0.0;
  double s = 0.5 * (g[0] + g[g.size() - 1]);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) s += g[i];
  return s * g.spacing();
}

}  // namespace qslimit
