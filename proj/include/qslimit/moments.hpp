#pragma once

// Moments of the limit Y from the fixed-point identity
//   Y = U Y + (1-U) Z + g(U).
// Raising both sides to the k-th power, taking expectations and using
// independence,
//   m_k = sum_{a+b+c=k} k!/(a! b! c!) E[U^a (1-U)^b g(U)^c] m_a m_b.
// The two terms with a = k or b = k contribute 2 m_k / (k+1), so
//   m_k = (k+1)/(k-1) * sum_{a<k, b<k} (...),   k >= 2,
// with m_0 = 1 and m_1 = 0 (the limit is centred).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qslimit/quadrature.hpp"
#include "qslimit/special.hpp"

namespace qslimit {

/// E[U^a (1-U)^b g(U)^c] for U uniform on (0, 1).
inline double g_moment(int a, int b, int c, const QuadratureSpec& spec) {
  if (a < 0 || b < 0 || c < 0)
    throw std::domain_error("g_moment: exponents must be >= 0");
  auto integrand = [=](double u) {
    return std::pow(u, a) * std::pow(1.0 - u, b) * std::pow(g_func(u), c);
  };
  return integrate_unit(integrand, spec).value;
}

/// m[k] = E Y^k for k = 0..K.
class MomentSequence {
 public:
  explicit MomentSequence(std::vector<double> m, double abs_tol = 0.0)
      : m_(std::move(m)), abs_tol_(abs_tol) {
    if (m_.size() < 2) throw std::invalid_argument("need at least m_0 and m_1");
    if (m_[0] != 1.0) throw std::invalid_argument("m_0 must be 1");
    if (m_[1] != 0.0) throw std::invalid_argument("m_1 must be 0");
    for (std::size_t k = 2; k < m_.size(); k += 2)
      if (!(m_[k] > 0.0))
        throw std::invalid_argument("even moment m_" + std::to_string(k) +
                                    " is not positive");
  }

  std::size_t order() const noexcept { return m_.size() - 1; }
  double operator[](std::size_t k) const { return m_.at(k); }
  const std::vector<double>& values() const noexcept { return m_; }
  /// Quadrature tolerance used for the mixed moments.
  double abs_tol() const noexcept { return abs_tol_; }

  /// m_{2j}^{1/(2j)} nondecreasing in j.
  bool lyapunov_consistent() const {
    double prev = 0.0;
    for (std::size_t k = 2; k < m_.size(); k += 2) {
      const double r = std::pow(m_[k], 1.0 / static_cast<double>(k));
      if (r < prev * (1.0 - 1e-12)) return false;
      prev = r;
    }
    return true;
  }

  /// m_{2j}^{1/(2j)} / (2j), j >= 1; stays bounded because the mgf is finite.
  std::vector<double> growth_profile() const {
    std::vector<double> out;
    for (std::size_t k = 2; k < m_.size(); k += 2)
      out.push_back(std::pow(m_[k], 1.0 / static_cast<double>(k)) /
                    static_cast<double>(k));
    return out;
  }

 private:
  std::vector<double> m_;
  double abs_tol_;
};

using MixedMoment = std::function<double(int, int, int)>;

/// Runs the recursion with a caller-supplied E[U^a (1-U)^b g^c]; the
/// result is not validated.
inline std::vector<double> pump_moment_values(int K, const MixedMoment& mixed) {
  if (K < 2) throw std::domain_error("pump_moments: K must be >= 2");
  std::vector<double> m(K + 1, 0.0);
  m[0] = 1.0;
  m[1] = 0.0;
  std::vector<double> fact(K + 1, 1.0);
  for (int i = 1; i <= K; ++i) fact[i] = fact[i - 1] * i;
  for (int k = 2; k <= K; ++k) {
    double s = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; a + b <= k && b < k; ++b) {
        const int c = k - a - b;
        const double coeff = m[a] * m[b];
        if (coeff == 0.0) continue;
        s += fact[k] / (fact[a] * fact[b] * fact[c]) * mixed(a, b, c) * coeff;
      }
    }
    m[k] = static_cast<double>(k + 1) / static_cast<double>(k - 1) * s;
  }
  return m;
}

inline MomentSequence pump_moments_with(int K, const MixedMoment& mixed,
                                        double abs_tol = 0.0) {
  return MomentSequence(pump_moment_values(K, mixed), abs_tol);
}

inline MomentSequence pump_moments(int K = 8,
                                   const QuadratureSpec& spec = {1e-13, 4000}) {
  return pump_moments_with(
      K, [&](int a, int b, int c) { return g_moment(a, b, c, spec); },
      spec.abs_tol);
}

/// Upper bounds on E|Y|^j for j = 0..j_max: m_j for even j, and
/// m_{j+1}^{j/(j+1)} (Lyapunov) for odd j.
inline std::vector<double> abs_moment_bounds(const MomentSequence& ms, int j_max) {
  if (j_max < 0) throw std::domain_error("abs_moment_bounds: j_max must be >= 0");
  const int need = j_max % 2 == 0 ? j_max : j_max + 1;
  if (static_cast<std::size_t>(need) > ms.order())
    throw std::out_of_range("abs_moment_bounds: need moments through order " +
                            std::to_string(need) + ", have " +
                            std::to_string(ms.order()));
  std::vector<double> out(j_max + 1);
  for (int j = 0; j <= j_max; ++j) {
    if (j % 2 == 0) {
      out[j] = ms[j];
    } else {
      out[j] = std::pow(ms[j + 1], static_cast<double>(j) / (j + 1.0));
    }
  }
  return out;
}

}  // namespace qslimit
