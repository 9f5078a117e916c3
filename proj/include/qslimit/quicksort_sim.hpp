#pragma once

// Finite-n comparison counts of randomized Quicksort: exact moments, the
// exact law for small n, and sampling through the distributional recurrence
//   X_n = X_{U-1} + X*_{n-U} + n - 1,   U uniform on {1..n}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qslimit/grid.hpp"
#include "qslimit/parallel.hpp"

namespace qslimit {

/// E X_n = 2(n+1) H_n - 4n for n = 0..n_max.
inline std::vector<double> exact_mean_table(std::int64_t n_max) {
  if (n_max < 0) throw std::domain_error("exact_mean: n must be >= 0");
  std::vector<double> mu(static_cast<std::size_t>(n_max) + 1);
  double h = 0.0;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    if (n > 0) h += 1.0 / static_cast<double>(n);
    mu[static_cast<std::size_t>(n)] =
        2.0 * static_cast<double>(n + 1) * h - 4.0 * static_cast<double>(n);
  }
  return mu;
}

inline double exact_mean(std::int64_t n) {
  if (n < 0) throw std::domain_error("exact_mean: n must be >= 0");
  // Summing from small terms up keeps H_n accurate for large n.
  double h = 0.0;
  for (std::int64_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return 2.0 * static_cast<double>(n + 1) * h - 4.0 * static_cast<double>(n);
}

/// Var X_m for m = 0..n_max. Conditioning on the pivot rank k,
///   Var X_m = (2/m) sum_{j<m} Var X_j
///           + (1/m) sum_{k=1}^m (mu_{k-1} + mu_{m-k} + m - 1 - mu_m)^2,
/// which avoids the cancellation in E X^2 - (E X)^2. O(n_max^2).
inline std::vector<double> exact_variance_table(std::int64_t n_max) {
  if (n_max < 0) throw std::domain_error("exact_variance: n must be >= 0");
  const auto mu = exact_mean_table(n_max);
  std::vector<double> var(mu.size(), 0.0);
  double var_sum = 0.0;  // sum of var[0..m-1]
  for (std::size_t m = 1; m < mu.size(); ++m) {
    var_sum += var[m - 1];
    double spread = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
      const double d = mu[k - 1] + mu[m - k] + static_cast<double>(m - 1) - mu[m];
      spread += d * d;
    }
    const double md = static_cast<double>(m);
    var[m] = 2.0 * var_sum / md + spread / md;
  }
  return var;
}

inline double exact_variance(std::int64_t n) {
  return exact_variance_table(n).back();
}

/// Exact law of X_n: entry c is P(X_n = c), c = 0..n(n-1)/2.
inline std::vector<std::vector<double>> exact_law_table(int n_max) {
  if (n_max < 0 || n_max > 60)
    throw std::domain_error("exact_law: n must lie in [0, 60]");
  std::vector<std::vector<double>> law(n_max + 1);
  law[0] = {1.0};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> p(static_cast<std::size_t>(n) * (n - 1) / 2 + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
      const auto& a = law[k - 1];
      const auto& b = law[n - k];
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
          p[i + j + n - 1] += a[i] * b[j] / n;
    }
    law[n] = std::move(p);
  }
  return law;
}

using Rng = std::mt19937_64;

/// One draw of X_n by unrolling the recurrence with an explicit stack.
inline std::int64_t sample_X(std::int64_t n, Rng& rng) {
  if (n < 0) throw std::domain_error("sample_X: n must be >= 0");
  std::int64_t total = 0;
  std::vector<std::int64_t> stack;
  stack.push_back(n);
  while (!stack.empty()) {
    const std::int64_t m = stack.back();
    stack.pop_back();
    if (m <= 1) continue;
    total += m - 1;
    if (m == 2) continue;
    std::uniform_int_distribution<std::int64_t> pick(1, m);
    const std::int64_t u = pick(rng);
    stack.push_back(u - 1);
    stack.push_back(m - u);
  }
  return total;
}

inline double standardize(double x, std::int64_t n, double mean_n) {
  if (n < 1) throw std::domain_error("standardize: n must be >= 1");
  return (x - mean_n) / static_cast<double>(n);
}

/// Y_n = (X_n - E X_n) / n.
inline double standardize(double x, std::int64_t n) {
  if (n < 1) throw std::domain_error("standardize: n must be >= 1");
  return standardize(x, n, exact_mean(n));
}

/// Reference CDF lookup: linear inside the grid, 0 / 1 outside.
inline double cdf_at(const RealGrid& F, double x) {
  if (x < F.origin()) return 0.0;
  if (x > F.last_point()) return 1.0;
  return F.linear_at(x, 1.0);
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// the reference CDF.
inline double ks_distance(std::vector<double> samples, const RealGrid& reference) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf_at(reference, samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F,
                  F - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::uint64_t> counts;
};

struct SimulationSummary {
  std::int64_t n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;      // of X_n
  double variance = 0.0;  // of X_n (unbiased)
  double std_mean = 0.0;  // of Y_n
  double std_variance = 0.0;
  std::optional<double> ks;
  Histogram histogram;  // of Y_n
};

inline constexpr std::uint64_t kSampleChunk = 4096;

/// Draws `count` samples of X_n. Chunk c uses a generator seeded from
/// (seed, c), so the stream is independent of how chunks are scheduled.
inline std::vector<std::int64_t> sample_many(std::int64_t n, std::uint64_t count,
                                             std::uint64_t seed) {
  std::vector<std::int64_t> out(count);
  const std::uint64_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c),
                      static_cast<std::uint32_t>(c >> 32)};
    Rng rng(seq);
    const std::uint64_t lo = c * kSampleChunk;
    const std::uint64_t hi = std::min<std::uint64_t>(count, lo + kSampleChunk);
    for (std::uint64_t i = lo; i < hi; ++i) out[i] = sample_X(n, rng);
  });
  return out;
}

inline Histogram make_histogram(const std::vector<double>& ys, int bins, double lo,
                                double hi) {
  if (bins < 1 || !(hi > lo)) throw std::invalid_argument("bad histogram range");
  Histogram h;
  h.counts.assign(bins, 0);
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
  for (double y : ys) {
    auto b = static_cast<long>(std::floor((y - lo) / (hi - lo) * bins));
    b = std::clamp<long>(b, 0, bins - 1);  // out-of-range samples land in end bins
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

struct SimulationConfig {
  std::int64_t n = 1000;
  std::uint64_t samples = 200000;
  std::uint64_t seed = 42;
  int bins = 60;
  double hist_lo = -3.0;
  double hist_hi = 5.0;
};

/// Samples X_n, standardizes, and summarizes; KS against `reference` if given.
inline SimulationSummary simulate(const SimulationConfig& cfg,
                                  const RealGrid* reference = nullptr,
                                  std::vector<double>* standardized = nullptr) {
  if (cfg.n < 1) throw std::domain_error("simulate: n must be >= 1");
  if (cfg.samples < 1) throw std::invalid_argument("simulate: need samples >= 1");
  const auto xs = sample_many(cfg.n, cfg.samples, cfg.seed);
  const double mu_n = exact_mean(cfg.n);
  SimulationSummary s;
  s.n = cfg.n;
  s.samples = cfg.samples;
  s.seed = cfg.seed;
  // Accumulate deviations from the exact mean in index order.
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = static_cast<double>(xs[i]) - mu_n;
    sum += d;
    sum2 += d * d;
    ys[i] = d / static_cast<double>(cfg.n);
  }
  const double N = static_cast<double>(xs.size());
  const double dbar = sum / N;
  s.mean = mu_n + dbar;
  s.variance = N > 1 ? (sum2 - N * dbar * dbar) / (N - 1.0) : 0.0;
  const double nn = static_cast<double>(cfg.n);
  s.std_mean = dbar / nn;
  s.std_variance = s.variance / (nn * nn);
  s.histogram = make_histogram(ys, cfg.bins, cfg.hist_lo, cfg.hist_hi);
  if (reference) s.ks = ks_distance(ys, *reference);
  if (standardized) *standardized = std::move(ys);
  return s;
}

}  // namespace qslimit
