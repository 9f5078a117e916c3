#pragma once

// End-to-end checks against the published constants and the cross-route
// agreement targets. Shared by the acceptance test binary and `qslimit report`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "qslimit/cf_bounds.hpp"
#include "qslimit/cf_solver.hpp"
#include "qslimit/density_solver.hpp"
#include "qslimit/envelope_integrals.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/quicksort_sim.hpp"

namespace qslimit {

struct CriterionResult {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

/// Law of the comparison count over all n! inputs, by running a
/// first-element-pivot Quicksort with order-preserving partitions on every
/// permutation. Keys are comparison counts, values probabilities.
inline std::map<int, double> enumerate_comparison_law(int n) {
  if (n < 0 || n > 9) throw std::domain_error("enumeration limited to n <= 9");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::map<int, std::uint64_t> counts;
  std::uint64_t total = 0;
  auto sort_count = [](auto&& self, const std::vector<int>& a) -> int {
    if (a.size() < 2) return 0;
    std::vector<int> lo, hi;
    int comparisons = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      ++comparisons;
      (a[i] < a[0] ? lo : hi).push_back(a[i]);
    }
    return comparisons + self(self, lo) + self(self, hi);
  };
  do {
    ++counts[sort_count(sort_count, perm)];
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::map<int, double> law;
  for (auto [c, k] : counts) law[c] = static_cast<double>(k) / static_cast<double>(total);
  return law;
}

/// Pearson chi-square of sampled X_n against `law`, pooling cells with
/// expected count below 5. Returns {statistic, critical value at `alpha`}.
inline std::pair<double, double> chi_square_vs_law(const std::map<int, double>& law,
                                                   const std::vector<std::int64_t>& xs,
                                                   double alpha) {
  std::map<int, std::uint64_t> seen;
  for (auto x : xs) ++seen[static_cast<int>(x)];
  const double N = static_cast<double>(xs.size());
  std::vector<std::pair<double, double>> cells;  // expected, observed
  double pe = 0.0, po = 0.0;
  for (auto [c, p] : law) {
    pe += p * N;
    po += static_cast<double>(seen[c]);
    if (pe >= 5.0) {
      cells.emplace_back(pe, po);
      pe = po = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(pe, po);
    } else {
      cells.back().first += pe;
      cells.back().second += po;
    }
  }
  // samples outside the support make the statistic infinite
  double stray = 0.0;
  for (auto [c, k] : seen)
    if (!law.count(c)) stray += static_cast<double>(k);
  if (stray > 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  double stat = 0.0;
  for (auto [e, o] : cells) stat += (o - e) * (o - e) / e;
  const double df = std::max<double>(1.0, static_cast<double>(cells.size()) - 1.0);
  boost::math::chi_squared dist(df);
  return {stat, boost::math::quantile(boost::math::complement(dist, alpha))};
}

/// Pinned settings for the acceptance run.
struct AcceptanceSettings {
  double cf_t_max = 200.0;
  std::size_t cf_points = 4096;
  int cf_max_iter = 200;
  double cf_tol = 1e-8;
  double x_min = -4.0;
  double x_max = 6.0;
  double dx = 0.005;
  int u_nodes = 64;
  int density_max_iter = 60;
  double density_tol = 1e-6;
  std::int64_t sim_n = 1000;
  std::uint64_t sim_samples = 200000;
  std::uint64_t seed = 42;
  int vdc_pairs = 100;
  int vdc_ts = 20;
  QuadratureSpec vdc_spec{1e-9, 400000};
};

/// Caches the expensive fixed points across criteria.
class AcceptanceContext {
 public:
  explicit AcceptanceContext(AcceptanceSettings s = {}) : s_(s) {}
  const AcceptanceSettings& settings() const { return s_; }

  const CfIteration& cf() {
    if (!cf_)
      cf_ = iterate_cf(init_gaussian_cf(s_.cf_t_max, s_.cf_points), s_.cf_max_iter,
                       s_.cf_tol);
    return *cf_;
  }
  const DensityIteration& density() {
    if (!density_) {
      DensityMapOptions opt;
      opt.u_nodes = s_.u_nodes;
      density_ = iterate_density(init_gaussian_density(s_.x_min, s_.x_max, s_.dx),
                                 s_.density_max_iter, s_.density_tol, opt);
    }
    return *density_;
  }
  const MomentSequence& moments() {
    if (!moments_) moments_ = pump_moments(8);
    return *moments_;
  }

 private:
  AcceptanceSettings s_;
  std::optional<CfIteration> cf_;
  std::optional<DensityIteration> density_;
  std::optional<MomentSequence> moments_;
};

namespace detail {

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!first_) out_ << "; ";
    first_ = false;
    out_ << (ok ? "" : "FAILED ") << what;
  }
  bool pass() const { return pass_; }
  std::string detail() const { return out_.str(); }

 private:
  bool pass_ = true;
  bool first_ = true;
  std::ostringstream out_;
};

inline std::string num(double v, int prec = 6) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

// value <= ceiling and value >= (1 - slack) * ceiling
inline bool just_below(double v, double ceiling, double slack) {
  return v <= ceiling && v >= (1.0 - slack) * ceiling;
}

}  // namespace detail

inline CriterionResult criterion_bound_chain() {
  detail::Checks c;
  const auto chain = standard_chain(3.5);
  const double c32 = chain.constant(1.5);
  const double c52 = chain.constant(2.5);
  const double c72 = chain.constant(3.5);
  c.expect(c32 > 186.3 && c32 <= 187.0, "c_3/2 = " + detail::num(c32, 8) + " in (186.3, 187]");
  c.expect(detail::just_below(c32, 187.0, 0.005), "c_3/2 within 0.5% below 187");
  c.expect(detail::just_below(c52, 103215.0, 0.005),
           "c_5/2 = " + detail::num(c52, 10) + " within 0.5% below 103215");
  c.expect(detail::just_below(c72, 197102280.0, 0.005),
           "c_7/2 = " + detail::num(c72, 12) + " within 0.5% below 197102280");
  const double s8pi = std::sqrt(8.0 * std::numbers::pi);
  c.expect(std::abs(chain.constant(0.75) - s8pi) <= 1e-12 * s8pi, "c_3/4 = sqrt(8 pi)");
  const double fourpi = 4.0 * std::numbers::pi;
  c.expect(std::abs(chain.constant(1.0) - fourpi) <= 1e-12 * fourpi, "c_1 = 4 pi");
  c.expect(chain.find(1.5)->ceiling() == 187.0 && chain.find(2.5)->ceiling() == 103215.0 &&
               chain.find(3.5)->ceiling() == 197102280.0,
           "display ceilings 187 / 103215 / 197102280");
  c.expect(chain.monotone_consistent(), "c_p^{1/p} monotone");
  return {1, "bound-chain reproduction", c.pass(), c.detail()};
}

inline CriterionResult criterion_sup_bounds() {
  detail::Checks c;
  const auto chain = standard_chain(3.5);
  const auto plain = make_envelope(chain, false);
  const auto trick = make_envelope(chain, true);
  const auto deep = make_envelope(standard_chain(4.5), true);
  const double f_plain = sup_fk_bound(plain, 0);
  const double f_trick = sup_fk_bound(trick, 0);
  const double f1_plain = sup_fk_bound(plain, 1);
  const double f1_trick = sup_fk_bound(trick, 1);
  const double f1_deep = sup_fk_bound(deep, 1);
  c.expect(f_plain >= 18.0 && f_plain <= 18.2, "sup f plain = " + detail::num(f_plain) + " in [18.0, 18.2]");
  c.expect(f_trick < 15.3, "sup f with log bound = " + detail::num(f_trick) + " < 15.3");
  c.expect(detail::just_below(f1_plain, 3652.1, 0.01), "sup|f'| plain = " + detail::num(f1_plain, 8) + " < 3652.1");
  c.expect(detail::just_below(f1_trick, 2492.1, 0.01), "sup|f'| with log bound = " + detail::num(f1_trick, 8) + " < 2492.1");
  c.expect(detail::just_below(f1_deep, 2465.9, 0.01) && f1_deep < 2466.0,
           "sup|f'| with p=9/2 = " + detail::num(f1_deep, 8) + " near 2465.9");
  try {
    const auto m = maxf_theorem_check();
    c.expect(m.sup_f < 16.0 && m.sup_f1 < 2466.0, "max f < 16 and max|f'| < 2466");
  } catch (const std::exception& e) {
    c.expect(false, std::string("maxf_theorem_check: ") + e.what());
  }
  return {2, "density sup-bounds", c.pass(), c.detail()};
}

inline CriterionResult criterion_van_der_corput(const AcceptanceSettings& s) {
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  double worst_margin = -1e300;  // max of |vdc| - 2 t^-1/2
  double worst_t = 0.0;
  for (int i = 0; i < s.vdc_pairs; ++i) {
    const double y = coord(rng);
    const double z = coord(rng);
    for (int j = 0; j < s.vdc_ts; ++j) {
      const double t = std::pow(10.0, 4.0 * j / (s.vdc_ts - 1));
      const double m = std::abs(vdc_cf(y, z, t, s.vdc_spec)) - 2.0 / std::sqrt(t);
      if (m > worst_margin) {
        worst_margin = m;
        worst_t = t;
      }
    }
  }
  detail::Checks c;
  c.expect(worst_margin <= 10.0 * s.vdc_spec.abs_tol,
           "max(|E e^{ith}| - 2/sqrt t) = " + detail::num(worst_margin) + " at t = " +
               detail::num(worst_t) + " over " + std::to_string(s.vdc_pairs * s.vdc_ts) + " cases");
  return {3, "van der Corput property", c.pass(), c.detail()};
}

inline CriterionResult criterion_cf_fixed_point(AcceptanceContext& ctx) {
  detail::Checks c;
  try {
    const auto& r = ctx.cf();
    c.expect(r.final_diff < 1e-8 && r.iterations <= 200,
             "converged in " + std::to_string(r.iterations) + " iterations, diff " +
                 detail::num(r.final_diff));
    const auto env = make_envelope(standard_chain(4.5), true);
    double worst = -1e300;
    for (std::size_t i = 1; i < r.phi.size(); ++i) {
      const double t = r.phi.grid().point(i);
      worst = std::max(worst, std::abs(r.phi[i]) - env(t));
    }
    c.expect(worst <= 1e-6, "max(|phi| - envelope) = " + detail::num(worst));
    const double dt = r.phi.dt();
    const double var = -2.0 * (r.phi[1].real() - 1.0) / (dt * dt);
    c.expect(std::abs(var - kLimitVariance) <= 1e-3,
             "-phi''(0) = " + detail::num(var, 8) + " vs 0.42026");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  return {4, "CF fixed point", c.pass(), c.detail()};
}

/// Points within 2% of either end of the grid are excluded from the
/// positivity check: there the true density lies below double underflow.
inline constexpr double kInteriorMargin = 0.02;

inline CriterionResult criterion_density_fixed_point(AcceptanceContext& ctx) {
  detail::Checks c;
  try {
    const auto& r = ctx.density();
    const auto& f = r.f;
    const double ratio = tail_ratio(r.diff_history);
    c.expect(r.iterations <= 60 && r.diff_history.back() < 1e-6,
             "converged in " + std::to_string(r.iterations) + " iterations");
    c.expect(ratio < 0.95, "geometric decay ratio " + detail::num(ratio, 3));
    c.expect(std::abs(f.mean()) < 5e-3, "mean " + detail::num(f.mean()));
    c.expect(std::abs(f.variance() - kLimitVariance) < 5e-3,
             "variance " + detail::num(f.variance(), 8));
    c.expect(std::abs(f.mass() - 1.0) <= 1e-9, "mass 1");
    const double margin = kInteriorMargin * (f.x_max() - f.x_min());
    c.expect(positivity_check(f, 0.0, f.x_min() + margin, f.x_max() - margin),
             "positive on interior");
    c.expect(f.max_value() > 0.55 && f.max_value() < 0.75,
             "max f = " + detail::num(f.max_value()));
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  return {5, "density fixed point", c.pass(), c.detail()};
}

inline CriterionResult criterion_route_independence(AcceptanceContext& ctx) {
  detail::Checks c;
  try {
    const auto& d = ctx.density().f;
    const auto inv = invert_cf(ctx.cf().phi, 0, d.x_min(), d.dx(), d.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double x = d.grid().point(i);
      if (x >= -2.0 - 1e-12 && x <= 4.0 + 1e-12) sup = std::max(sup, std::abs(inv[i] - d[i]));
    }
    c.expect(sup < 1e-2, "sup |f_cf - f_density| on [-2, 4] = " + detail::num(sup));
    const auto& ms = ctx.moments();
    for (int k = 2; k <= 4; ++k) {
      const double grid_m = d.moment(k);
      c.expect(std::abs(ms[k] - grid_m) < 1e-2,
               "m_" + std::to_string(k) + " pumped " + detail::num(ms[k]) + " vs grid " +
                   detail::num(grid_m));
    }
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  return {6, "route independence", c.pass(), c.detail()};
}

inline CriterionResult criterion_simulation(AcceptanceContext& ctx) {
  detail::Checks c;
  try {
    const auto& s = ctx.settings();
    const auto F = cdf(ctx.density().f);
    SimulationConfig cfg;
    cfg.n = s.sim_n;
    cfg.samples = s.sim_samples;
    cfg.seed = s.seed;
    const auto sum = simulate(cfg, &F);
    const double mu = exact_mean(s.sim_n);
    const double var = exact_variance(s.sim_n);
    const double se = std::sqrt(var / static_cast<double>(s.sim_samples));
    c.expect(std::abs(sum.mean - mu) <= 3.0 * se,
             "mean " + detail::num(sum.mean, 9) + " vs " + detail::num(mu, 9) + " (3 SE = " +
                 detail::num(3.0 * se) + ")");
    c.expect(std::abs(sum.variance / var - 1.0) <= 0.05,
             "variance ratio " + detail::num(sum.variance / var));
    c.expect(sum.ks && *sum.ks < 0.05, "KS " + detail::num(sum.ks.value_or(1.0)));
    for (int n = 2; n <= 7; ++n) {
      const auto law = enumerate_comparison_law(n);
      const auto xs = sample_many(n, 100000, s.seed + static_cast<std::uint64_t>(n));
      const auto [stat, crit] = chi_square_vs_law(law, xs, 1e-3);
      c.expect(stat <= crit, "n=" + std::to_string(n) + " chi2 " + detail::num(stat, 4) +
                                 " <= " + detail::num(crit, 4));
    }
    c.expect(exact_mean(3) == 8.0 / 3.0 || std::abs(exact_mean(3) - 8.0 / 3.0) < 1e-15,
             "E X_3 = 8/3");
    c.expect(std::abs(exact_variance(3) - 2.0 / 9.0) < 1e-15, "Var X_3 = 2/9");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  return {7, "simulation convergence", c.pass(), c.detail()};
}

/// Figure-level claims that are reported but deliberately not asserted.
inline CriterionResult criterion_excluded_claims(AcceptanceContext& ctx) {
  std::string detail;
  try {
    const auto& r = ctx.density();
    detail = "not asserted: exact max f ~ 2/3 (observed " + detail::num(r.f.max_value()) +
             "); tail rates of the density; exponential convergence rate (observed ratio " +
             detail::num(tail_ratio(r.diff_history), 3) + ")";
  } catch (const std::exception& e) {
    return {8, "excluded claims (descriptive)", false, e.what()};
  }
  return {8, "excluded claims (descriptive)", true, detail};
}

inline std::vector<CriterionResult> run_acceptance(AcceptanceContext& ctx) {
  std::vector<CriterionResult> out;
  out.push_back(criterion_bound_chain());
  out.push_back(criterion_sup_bounds());
  out.push_back(criterion_van_der_corput(ctx.settings()));
  out.push_back(criterion_cf_fixed_point(ctx));
  out.push_back(criterion_density_fixed_point(ctx));
  out.push_back(criterion_route_independence(ctx));
  out.push_back(criterion_simulation(ctx));
  out.push_back(criterion_excluded_claims(ctx));
  return out;
}

}  // namespace qslimit
