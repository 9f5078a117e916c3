#pragma once

// Certified decay bounds |phi(t)| <= c_p |t|^-p for the characteristic
// function of the limiting Quicksort law, the piecewise envelope they
// define, and bounds on the derivatives of phi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qslimit/quadrature.hpp"
#include "qslimit/special.hpp"

namespace qslimit {

enum class BoundForm { pure_power, power_log };

/// c * t^-p, or for power_log c * t^-2 * (ln(t / 4pi) + 2), valid for
/// t >= valid_from.
struct DecayBound {
  double p = 0.0;
  double c = 1.0;
  BoundForm form = BoundForm::pure_power;
  double valid_from = 0.0;

  double operator()(double t) const {
    if (t < valid_from) return std::numeric_limits<double>::infinity();
    if (form == BoundForm::power_log) {
      return c / (t * t) * (std::log(t / (4.0 * std::numbers::pi)) + 2.0);
    }
    if (p == 0.0) return c;
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    return c * std::pow(t, -p);
  }
};

inline constexpr double kLogBoundThreshold = 1.72;

inline DecayBound c_half() { return {0.5, 2.0, BoundForm::pure_power, 0.0}; }

/// Geometric interpolation between the p = 1/2 and p = 1 bounds.
inline DecayBound c_interp(double p) {
  if (!(p >= 0.5 && p <= 1.0))
    throw std::domain_error("c_interp: p must lie in [1/2, 1]");
  const double c =
      std::pow(2.0, 2.0 * p) * std::pow(std::numbers::pi, 2.0 * p - 1.0);
  return {p, c, BoundForm::pure_power, 0.0};
}

/// Beta-integral doubling: c_{2p} <= Gamma(1-p)^2 / Gamma(2-2p) * c_p^2.
inline DecayBound c_double(double p, double cp) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("c_double: p must lie in (0, 1)");
  if (!(cp > 0.0)) throw std::domain_error("c_double: constant must be > 0");
  const double g = gamma(1.0 - p);
  return {2.0 * p, g * g / gamma(2.0 - 2.0 * p) * cp * cp,
          BoundForm::pure_power, 0.0};
}

/// Exponent step: c_{p+1} <= 2^{p+1} c_p^{1+1/p} p / (p-1), p > 1.
inline DecayBound c_step(double p, double cp) {
  if (!(p > 1.0)) throw std::domain_error("c_step: p must exceed 1");
  if (!(cp > 0.0)) throw std::domain_error("c_step: constant must be > 0");
  const double c =
      std::pow(2.0, p + 1.0) * std::pow(cp, 1.0 + 1.0 / p) * p / (p - 1.0);
  return {p + 1.0, c, BoundForm::pure_power, 0.0};
}

/// The uniform estimate c_p <= 2^{p^2 + 6p}.
inline DecayBound c_universal(double p) {
  if (!(p > 0.0)) throw std::domain_error("c_universal: p must be > 0");
  return {p, std::pow(2.0, p * p + 6.0 * p), BoundForm::pure_power, 0.0};
}

inline DecayBound log_decay_bound() {
  return {2.0, 32.0 * std::numbers::pi * std::numbers::pi, BoundForm::power_log,
          kLogBoundThreshold};
}

/// 32 pi^2 t^-2 (ln(t/(4 pi)) + 2); asserted only for t >= 1.72.
inline double log_bound(double t) {
  if (!(t >= kLogBoundThreshold))
    throw std::domain_error("log_bound: only valid for t >= 1.72");
  return log_decay_bound()(t);
}

enum class Provenance {
  trivial,          // |phi| <= 1
  van_der_corput,   // p = 1/2 from the oscillatory-integral lemma
  interpolation,    // geometric mean of p = 1/2 and p = 1
  beta_doubling,    // p -> 2p through the beta integral
  step_lemma,       // p -> p + 1, p > 1
  monotone,         // c_p^{1/p} nondecreasing in p
};

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::trivial: return "trivial";
    case Provenance::van_der_corput: return "van_der_corput";
    case Provenance::interpolation: return "interpolation";
    case Provenance::beta_doubling: return "beta_doubling";
    case Provenance::step_lemma: return "step_lemma";
    case Provenance::monotone: return "monotone";
  }
  return "unknown";
}

struct ChainEntry {
  double p;
  double c;  // unrounded
  Provenance provenance;

  /// Display value. Constants produced by doubling or stepping are rounded
  /// up to the next integer; closed forms are shown as they are.
  double ceiling() const {
    if (provenance == Provenance::beta_doubling ||
        provenance == Provenance::step_lemma)
      return std::ceil(c);
    return c;
  }
};

class BoundChain {
 public:
  explicit BoundChain(std::vector<ChainEntry> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("empty bound chain");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (!(e.c > 0.0) || !(e.p >= 0.0))
        throw std::invalid_argument("chain entries need p >= 0, c > 0");
      if (i > 0 && !(e.p > entries_[i - 1].p))
        throw std::invalid_argument("chain exponents must increase strictly");
      if (e.p == 0.0 && e.c != 1.0)
        throw std::invalid_argument("chain must have c_0 = 1");
    }
    if (!monotone_consistent())
      throw std::logic_error("bound chain violates c_p^{1/p} monotonicity");
  }

  std::span<const ChainEntry> entries() const noexcept { return entries_; }

  const ChainEntry* find(double p) const noexcept {
    for (const auto& e : entries_)
      if (std::abs(e.p - p) <= 1e-12 * std::max(1.0, p)) return &e;
    return nullptr;
  }

  double constant(double p) const {
    if (const auto* e = find(p)) return e->c;
    throw std::out_of_range("bound chain has no entry for p = " +
                            std::to_string(p));
  }

  double max_p() const noexcept { return entries_.back().p; }

  /// c_{p1}^{1/p1} <= c_{p2}^{1/p2} (1 + 1e-12) for all positive p1 <= p2.
  bool monotone_consistent() const {
    double prev = 0.0;
    for (const auto& e : entries_) {
      if (e.p == 0.0) continue;
      const double r = std::pow(e.c, 1.0 / e.p);
      if (prev > r * (1.0 + 1e-12)) return false;
      prev = std::max(prev, r);
    }
    return true;
  }

 private:
  std::vector<ChainEntry> entries_;
};

namespace detail {

inline bool near(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

inline bool is_integer(double p) { return near(p, std::round(p)); }

// Derives c_p and records every intermediate exponent in `out`.
inline ChainEntry derive_entry(double p, std::vector<ChainEntry>& out) {
  auto remember = [&](ChainEntry e) {
    for (const auto& o : out)
      if (near(o.p, e.p)) return o;
    out.push_back(e);
    return e;
  };
  if (p < 0.0) throw std::domain_error("negative decay exponent");
  if (near(p, 0.0)) return remember({0.0, 1.0, Provenance::trivial});
  if (near(p, 0.5)) {
    return remember({0.5, c_half().c, Provenance::van_der_corput});
  }
  if (p < 0.5) {
    const auto half = derive_entry(0.5, out);
    return remember({p, std::pow(half.c, 2.0 * p), Provenance::monotone});
  }
  if (p <= 1.0 + 1e-12) {
    derive_entry(0.5, out);
    const double q = std::min(p, 1.0);
    return remember({q, c_interp(q).c, Provenance::interpolation});
  }
  if (p < 2.0) {
    const auto base = derive_entry(0.5 * p, out);
    const auto d = c_double(base.p, base.c);
    return remember({p, d.c, Provenance::beta_doubling});
  }
  if (is_integer(p)) {
    throw std::domain_error(
        "exponent p = " + std::to_string(p) +
        " is not reachable: doubling gives p < 2 and the step lemma needs a "
        "base exponent above 1, so integers >= 2 fall in the gap");
  }
  const auto base = derive_entry(p - 1.0, out);
  const auto s = c_step(base.p, base.c);
  return remember({p, s.c, Provenance::step_lemma});
}

}  // namespace detail

/// Assembles the constants for `targets` and every exponent they depend on,
/// always including c_0 = 1.
inline BoundChain build_chain(std::span<const double> targets) {
  std::vector<ChainEntry> out;
  detail::derive_entry(0.0, out);
  for (double p : targets) detail::derive_entry(p, out);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.p < b.p; });
  return BoundChain(std::move(out));
}

/// The ladder 0, 1/2, 3/4, 1, 3/2, 5/2, ... up to max_p.
inline BoundChain standard_chain(double max_p) {
  std::vector<double> targets = {0.0};
  for (double p : {0.5, 0.75, 1.0, 1.5})
    if (p <= max_p + 1e-12) targets.push_back(p);
  for (double p = 2.5; p <= max_p + 1e-12; p += 1.0) targets.push_back(p);
  return build_chain(targets);
}

struct EnvelopePiece {
  double t_lo;
  double t_hi;  // may be +infinity
  DecayBound bound;
};

/// Pointwise minimum of bounds on |phi(t)|, tiling (0, inf).
class PiecewiseEnvelope {
 public:
  explicit PiecewiseEnvelope(std::vector<EnvelopePiece> pieces)
      : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("empty envelope");
    if (pieces_.front().t_lo != 0.0)
      throw std::invalid_argument("envelope must start at t = 0");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (pieces_[i].t_hi != pieces_[i + 1].t_lo)
        throw std::invalid_argument("envelope pieces must be contiguous");
      if (!(pieces_[i].t_hi > pieces_[i].t_lo))
        throw std::invalid_argument("envelope piece has empty range");
    }
    if (!std::isinf(pieces_.back().t_hi))
      throw std::invalid_argument("envelope must extend to infinity");
  }

  std::span<const EnvelopePiece> pieces() const noexcept { return pieces_; }

  double operator()(double t) const {
    t = std::abs(t);
    for (const auto& pc : pieces_)
      if (t < pc.t_hi) return pc.bound(t);
    return pieces_.back().bound(t);
  }

  /// Range where the log-augmented bound is active, if any.
  std::optional<std::pair<double, double>> log_interval() const {
    for (const auto& pc : pieces_)
      if (pc.bound.form == BoundForm::power_log)
        return std::make_pair(pc.t_lo, pc.t_hi);
    return std::nullopt;
  }

  double tail_exponent() const noexcept { return pieces_.back().bound.p; }

 private:
  std::vector<EnvelopePiece> pieces_;
};

namespace detail {

inline double crossing(const DecayBound& a, const DecayBound& b) {
  return std::pow(b.c / a.c, 1.0 / (b.p - a.p));
}

// Lower envelope of pure power laws, starting from the p = 0 bound.
inline std::vector<EnvelopePiece> power_envelope(
    const std::vector<DecayBound>& bounds) {
  std::vector<EnvelopePiece> pieces;
  std::size_t cur = 0;
  double t_lo = 0.0;
  for (;;) {
    std::optional<std::size_t> next;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = cur + 1; j < bounds.size(); ++j) {
      const double tc = crossing(bounds[cur], bounds[j]);
      if (!next || tc < best * (1.0 - 1e-9)) {
        next = j;
        best = tc;
      } else if (tc <= best * (1.0 + 1e-9)) {
        next = j;  // tie: the steeper bound wins beyond the crossing
        best = std::min(best, tc);
      }
    }
    if (!next) break;
    best = std::max(best, t_lo);
    if (best > t_lo) {
      pieces.push_back({t_lo, best, bounds[cur]});
      t_lo = best;
    }
    cur = *next;
  }
  pieces.push_back({t_lo, std::numeric_limits<double>::infinity(), bounds[cur]});
  return pieces;
}

inline double plain_value(const std::vector<EnvelopePiece>& pieces, double t) {
  for (const auto& pc : pieces)
    if (t < pc.t_hi) return pc.bound(t);
  return pieces.back().bound(t);
}

}  // namespace detail

/// Envelope min(1, c_{1/2} t^{-1/2}, ...) over the chain (display constants).
/// With use_log the log-augmented bound replaces the power pieces where it is
/// smaller; its crossings are located by bisection.
inline PiecewiseEnvelope make_envelope(const BoundChain& chain, bool use_log) {
  if (!chain.find(0.0))
    throw std::invalid_argument("make_envelope: chain must contain p = 0");
  std::vector<DecayBound> bounds;
  for (const auto& e : chain.entries())
    bounds.push_back({e.p, e.ceiling(), BoundForm::pure_power, 0.0});
  auto plain = detail::power_envelope(bounds);
  if (!use_log) return PiecewiseEnvelope(std::move(plain));

  const DecayBound lb = log_decay_bound();
  auto diff = [&](double t) { return lb(t) - detail::plain_value(plain, t); };
  auto bisect = [&](double lo, double hi) {
    // diff(lo) and diff(hi) have opposite signs.
    const bool lo_neg = diff(lo) < 0.0;
    while (hi - lo > 1e-9 * lo) {
      const double mid = 0.5 * (lo + hi);
      if ((diff(mid) < 0.0) == lo_neg) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  // Scan a log-spaced sample for the region where the log bound is lower.
  const double t_start = kLogBoundThreshold;
  const double t_end = 1e12;
  const int samples = 20000;
  const double ratio = std::pow(t_end / t_start, 1.0 / samples);
  std::optional<double> lo, hi;
  double prev_t = t_start;
  bool prev_neg = diff(prev_t) < 0.0;
  if (prev_neg) lo = t_start;
  for (int i = 1; i <= samples; ++i) {
    const double t = t_start * std::pow(ratio, i);
    const bool neg = diff(t) < 0.0;
    if (neg && !prev_neg && !lo) lo = bisect(prev_t, t);
    if (!neg && prev_neg && lo) {
      hi = bisect(prev_t, t);
      break;
    }
    prev_t = t;
    prev_neg = neg;
  }
  if (!lo) return PiecewiseEnvelope(std::move(plain));
  if (!hi) hi = std::numeric_limits<double>::infinity();

  std::vector<EnvelopePiece> out;
  for (const auto& pc : plain) {
    if (pc.t_hi <= *lo || pc.t_lo >= *hi) {
      out.push_back(pc);
      continue;
    }
    if (pc.t_lo < *lo) out.push_back({pc.t_lo, *lo, pc.bound});
    if (out.empty() || out.back().bound.form != BoundForm::power_log)
      out.push_back({*lo, *hi, lb});
    if (pc.t_hi > *hi) out.push_back({*hi, pc.t_hi, pc.bound});
  }
  return PiecewiseEnvelope(std::move(out));
}

/// Integral of e^{i t h_{y,z}(u)} over u in (0, 1).
inline std::complex<double> vdc_cf(double y, double z, double t,
                                   const QuadratureSpec& spec) {
  if (!(t > 0.0)) throw std::domain_error("vdc_cf: t must be > 0");
  auto integrand = [=](double u) {
    return std::polar(1.0, t * h_func(y, z, u));
  };
  return integrate_unit(integrand, spec).value;
}

/// Constant c_{p,k} with |phi^{(k)}(t)| <= c_{p,k} t^-p. The step from
/// k - 1 to k applies |g'| <= 2 sqrt(A B) t^{-p/2} to g = phi^{(k-1)}, with
/// A = c_{2p,k-1} and B = E|Y|^{k+1} >= sup |phi^{(k+1)}|, so each
/// derivative doubles the exponent required from the chain.
inline double derivative_cf_bound(int k, double p, const BoundChain& chain,
                                  std::span<const double> abs_moments) {
  if (k < 0) throw std::domain_error("derivative order must be >= 0");
  if (p < 0.0) throw std::domain_error("decay exponent must be >= 0");
  if (p == 0.0) {
    if (static_cast<std::size_t>(k) >= abs_moments.size())
      throw std::out_of_range("missing absolute moment E|Y|^" +
                              std::to_string(k));
    return abs_moments[k];
  }
  if (k == 0) {
    if (const auto* e = chain.find(p)) return e->c;
    throw std::out_of_range("chain exponent p = " + std::to_string(p) +
                            " required by the derivative recursion is missing");
  }
  if (static_cast<std::size_t>(k + 1) >= abs_moments.size())
    throw std::out_of_range("missing absolute moment E|Y|^" +
                            std::to_string(k + 1));
  const double a = derivative_cf_bound(k - 1, 2.0 * p, chain, abs_moments);
  return 2.0 * std::sqrt(a * abs_moments[k + 1]);
}

}  // namespace qslimit
