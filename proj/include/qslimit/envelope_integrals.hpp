#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qslimit/cf_bounds.hpp"
#include "qslimit/quadrature.hpp"

namespace qslimit {

/// Thrown when t^k times the envelope is not integrable at infinity.
class DivergentIntegral : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integral of t^k * bound(t) over one envelope piece. Power pieces use the
/// exact antiderivative; log-augmented pieces go through quadrature.
inline double piece_integral(const EnvelopePiece& piece, int k) {
  if (k < 0) throw std::domain_error("piece_integral: k must be >= 0");
  const double a = piece.t_lo;
  const double b = piece.t_hi;
  const auto& bd = piece.bound;

  if (bd.form == BoundForm::power_log) {
    if (a < bd.valid_from)
      throw std::domain_error("log-augmented bound used below its threshold");
    const QuadratureSpec spec{1e-9, 10000};
    auto integrand = [&](double t) { return std::pow(t, k) * bd(t); };
    if (std::isfinite(b)) return integrate(integrand, a, b, spec);
    if (k > 0)
      throw DivergentIntegral("t^k times the log-augmented tail diverges");
    // t = a / s maps (a, inf) onto (0, 1].
    auto mapped = [&](double s) { return integrand(a / s) * a / (s * s); };
    return integrate_unit(mapped, spec).value;
  }

  const double e = k - bd.p;  // integrand is c * t^e
  if (std::abs(e + 1.0) < 1e-14) {
    if (a <= 0.0 || !std::isfinite(b))
      throw DivergentIntegral("c/t piece must be bounded away from 0 and inf");
    return bd.c * (std::log(b) - std::log(a));
  }
  const double q = e + 1.0;
  if (!std::isfinite(b) && q >= 0.0)
    throw DivergentIntegral("unbounded piece with t^" + std::to_string(e) +
                            " diverges; extend the chain to p > " +
                            std::to_string(k + 1));
  if (a == 0.0 && q <= 0.0)
    throw DivergentIntegral("piece starting at 0 diverges");
  const double upper = std::isfinite(b) ? std::pow(b, q) : 0.0;
  const double lower = a == 0.0 ? 0.0 : std::pow(a, q);
  return bd.c * (upper - lower) / q;
}

struct EnvelopeReport {
  int k = 0;
  bool use_log = false;
  std::vector<std::pair<EnvelopePiece, double>> pieces;  // with contribution
  double total = 0.0;
  std::optional<double> published_ceiling;
};

/// (1/pi) * integral over t > 0 of t^k * envelope(t), which bounds
/// sup |f^{(k)}| via the inversion formula and conjugate symmetry.
inline EnvelopeReport sup_fk_report(const PiecewiseEnvelope& env, int k) {
  const auto& last = env.pieces().back().bound;
  const bool tail_ok = last.form == BoundForm::power_log
                           ? k == 0
                           : last.p > static_cast<double>(k) + 1.0;
  if (!tail_ok)
    throw DivergentIntegral(
        "envelope tail exponent " + std::to_string(last.p) +
        " does not exceed k + 1 = " + std::to_string(k + 1) +
        "; build a deeper chain");
  EnvelopeReport r;
  r.k = k;
  r.use_log = env.log_interval().has_value();
  for (const auto& pc : env.pieces()) {
    const double v = piece_integral(pc, k) / std::numbers::pi;
    r.pieces.emplace_back(pc, v);
    r.total += v;
  }
  return r;
}

inline double sup_fk_bound(const PiecewiseEnvelope& env, int k) {
  return sup_fk_report(env, k).total;
}

struct MaxfCheck {
  double sup_f;
  double sup_f1;
};

inline constexpr double kMaxfCeiling = 16.0;
inline constexpr double kMaxf1Ceiling = 2466.0;

/// Best available bounds: log trick on, chain through 7/2 for f and through
/// 9/2 for f'. Throws if either exceeds 16 or 2466.
inline MaxfCheck maxf_theorem_check() {
  const auto f_env = make_envelope(standard_chain(3.5), true);
  const auto f1_env = make_envelope(standard_chain(4.5), true);
  MaxfCheck out{sup_fk_bound(f_env, 0), sup_fk_bound(f1_env, 1)};
  if (!(out.sup_f < kMaxfCeiling))
    throw std::logic_error("sup f bound " + std::to_string(out.sup_f) +
                           " is not below 16");
  if (!(out.sup_f1 < kMaxf1Ceiling))
    throw std::logic_error("sup |f'| bound " + std::to_string(out.sup_f1) +
                           " is not below 2466");
  return out;
}

}  // namespace qslimit
