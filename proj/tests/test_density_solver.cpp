#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qslimit/density_solver.hpp"
#include "qslimit/quadrature.hpp"
#include "qslimit/quicksort_sim.hpp"

using namespace qslimit;

namespace {

const DensityIteration& fixed_point() {
  static const DensityIteration r = iterate_density(init_gaussian_density(), 60, 1e-6);
  return r;
}

// Standardized comparison counts at n = 10^4.
const std::vector<double>& mc_samples() {
  static const std::vector<double> ys = [] {
    const std::int64_t n = 10000;
    const auto xs = sample_many(n, 50000, 2024);
    const double mu = exact_mean(n);
    std::vector<double> out;
    for (auto x : xs) out.push_back(standardize(static_cast<double>(x), n, mu));
    return out;
  }();
  return ys;
}

double gaussian(double x, double s2) {
  return std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * std::numbers::pi * s2);
}

}  // namespace

TEST(DensityGrid, Invariants) {
  EXPECT_THROW(density_from_function(-1.0, 4.0, 0.01, [](double x) { return gaussian(x, 0.4); }),
               std::invalid_argument);
  EXPECT_THROW(density_from_function(-4.0, 6.0, 0.01, [](double) { return 1.0; }),
               std::invalid_argument);
  EXPECT_THROW(density_from_function(-4.0, 6.0, 0.01,
                                     [](double x) { return gaussian(x, 0.4) - 1e-3; }),
               std::invalid_argument);
  const auto g = init_gaussian_density();
  EXPECT_NEAR(g.mass(), 1.0, 1e-9);
  EXPECT_NEAR(g.variance(), kLimitVariance, 1e-7);
}

TEST(ApplyT, PreservesZeroMean) {
  const auto out = apply_T(init_gaussian_density());
  EXPECT_NEAR(out.mean(), 0.0, 2e-3);
  EXPECT_NEAR(out.mass(), 1.0, 1e-9);
}

TEST(ApplyT, VarianceMapOnNarrowGaussian) {
  // Var(out) = (2/3) Var(in) + int g^2.
  const double s2 = 0.05 * 0.05;
  const auto f = density_from_function(-2.0, 4.0, 0.0025, [s2](double x) { return gaussian(x, s2); });
  const auto out = apply_T(f, {128, true});
  const double g2 = integrate_unit([](double u) { return g_func(u) * g_func(u); }, {1e-12, 2000}).value;
  EXPECT_NEAR(out.variance(), 2.0 / 3.0 * s2 + g2, 2e-3);
  EXPECT_NEAR(out.variance(), 0.14175, 2e-3);
}

TEST(ApplyT, AffineVarianceFixedPoint) {
  const double g2 = integrate_unit([](double u) { return g_func(u) * g_func(u); }, {1e-12, 2000}).value;
  EXPECT_NEAR(3.0 * g2, 7.0 - 2.0 * std::numbers::pi * std::numbers::pi / 3.0, 1e-10);
}

TEST(ApplyT, SpreadsUniformSupport) {
  const auto u0 = init_uniform_density(-1.0, 1.0);
  EXPECT_FALSE(positivity_check(u0));
  const auto f1 = apply_T(u0);
  // y0 + g(u0) for interior y0 and u0 is reached with positive density.
  for (double y0 : {-0.5, 0.0, 0.7})
    for (double u : {0.1, 0.5, 0.8}) {
      const double x = y0 + g_func(u);
      const auto i = static_cast<std::size_t>(std::lround((x - f1.x_min()) / f1.dx()));
      EXPECT_GT(f1[i], 0.0) << "x = " << x;
    }
  // image of (-1, 1) reaches beyond the original support on both sides
  const double lo = -1.0 - (2.0 * std::log(2.0) - 1.0) + 0.1;
  EXPECT_TRUE(positivity_check(f1, 0.0, lo, 1.9));
}

TEST(ApplyT, RejectsBadOptions) {
  EXPECT_THROW(apply_T(init_gaussian_density(), {4, true}), std::invalid_argument);
}

TEST(IterateDensity, Converges) {
  const auto& r = fixed_point();
  EXPECT_LE(r.iterations, 60);
  EXPECT_LT(r.diff_history.back(), 1e-6);
  EXPECT_LT(tail_ratio(r.diff_history), 0.95);
  EXPECT_FALSE(r.warning.has_value());
  EXPECT_EQ(r.clipped, 0u);
  for (double m : r.masses) EXPECT_NEAR(m, 1.0, 1e-2);
}

TEST(IterateDensity, FixedPointShape) {
  const auto& f = fixed_point().f;
  EXPECT_NEAR(f.mass(), 1.0, 1e-9);
  EXPECT_LT(std::abs(f.mean()), 5e-3);
  EXPECT_NEAR(f.variance(), kLimitVariance, 5e-3);
  EXPECT_GT(f.max_value(), 0.55);
  EXPECT_LT(f.max_value(), 0.75);
  EXPECT_TRUE(positivity_check(f, 0.0, -1.0, 3.0));
}

TEST(IterateDensity, ReportsNonConvergence) {
  try {
    iterate_density(init_gaussian_density(), 1, 1e-12);
    FAIL() << "expected DensityNonConvergence";
  } catch (const DensityNonConvergence& e) {
    EXPECT_EQ(e.history().size(), 1u);
  }
}

TEST(Cdf, EndpointsAndMedian) {
  const auto F = cdf(fixed_point().f);
  EXPECT_NEAR(F[0], 0.0, 2e-3);
  EXPECT_NEAR(F[F.size() - 1], 1.0, 2e-3);
  const double med = quantile(F, 0.5);
  EXPECT_GT(med, -0.4);
  EXPECT_LT(med, 0.2);
  auto ys = mc_samples();
  std::nth_element(ys.begin(), ys.begin() + ys.size() / 2, ys.end());
  EXPECT_NEAR(med, ys[ys.size() / 2], 0.02);
}

TEST(Mgf, ValuesAndConvexity) {
  const auto& f = fixed_point().f;
  EXPECT_NEAR(mgf_estimate(f, 0.0), 1.0, 2e-3);
  const double m1 = mgf_estimate(f, 1.0);
  EXPECT_GT(m1, 1.0);
  EXPECT_LT(m1, 3.0);
  double mc = 0.0;
  for (double y : mc_samples()) mc += std::exp(y);
  mc /= static_cast<double>(mc_samples().size());
  EXPECT_NEAR(m1, mc, 0.03);
  const double h = mgf_estimate(f, 0.5);
  EXPECT_LE(h * h, mgf_estimate(f, 0.0) * m1 + 1e-6);
  EXPECT_THROW(mgf_estimate(f, 2.5), std::domain_error);
}
