#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qslimit/density_solver.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/quicksort_sim.hpp"

using namespace qslimit;

namespace {

const MomentSequence& moments8() {
  static const MomentSequence ms = pump_moments(8);
  return ms;
}

}  // namespace

TEST(GMoment, Values) {
  const QuadratureSpec spec{1e-12, 4000};
  EXPECT_NEAR(g_moment(0, 0, 0, spec), 1.0, 1e-12);
  EXPECT_LE(std::abs(g_moment(0, 0, 1, spec)), spec.abs_tol);
  const int n = 10'000'000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = g_func((i + 0.5) / n);
    s += g * g;
  }
  EXPECT_NEAR(g_moment(0, 0, 2, spec), s / n, 1e-6);
  // E[U^a (1-U)^b] = a! b! / (a+b+1)!
  EXPECT_NEAR(g_moment(2, 3, 0, spec), 2.0 * 6.0 / 720.0, 1e-12);
  EXPECT_THROW(g_moment(-1, 0, 0, spec), std::domain_error);
}

TEST(PumpMoments, LowOrders) {
  const auto& ms = moments8();
  EXPECT_EQ(ms[0], 1.0);
  EXPECT_EQ(ms[1], 0.0);
  EXPECT_NEAR(ms[2], 7.0 - 2.0 * std::numbers::pi * std::numbers::pi / 3.0, 1e-6);
  EXPECT_NEAR(ms[2], 0.4202628, 1e-6);
  EXPECT_TRUE(ms.lyapunov_consistent());
  for (double r : ms.growth_profile()) EXPECT_LT(r, 1.0);
  EXPECT_THROW(pump_moments(1), std::domain_error);
}

TEST(PumpMoments, DegenerateMixedMoments) {
  // g == 0 makes Y = 0 the fixed point, so every moment vanishes.
  const auto m = pump_moment_values(6, [](int a, int b, int c) {
    if (c > 0) return 0.0;
    return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  });
  EXPECT_EQ(m[0], 1.0);
  for (std::size_t k = 1; k < m.size(); ++k) EXPECT_NEAR(m[k], 0.0, 1e-15);
  EXPECT_THROW(MomentSequence{m}, std::invalid_argument);
}

TEST(MomentSequence, Validation) {
  EXPECT_THROW(MomentSequence({1.0}), std::invalid_argument);
  EXPECT_THROW(MomentSequence({0.5, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(MomentSequence({1.0, 0.1, 1.0}), std::invalid_argument);
  EXPECT_THROW(MomentSequence({1.0, 0.0, -1.0}), std::invalid_argument);
}

TEST(AbsMomentBounds, Values) {
  const auto b = abs_moment_bounds(moments8(), 3);
  EXPECT_EQ(b[0], 1.0);
  EXPECT_EQ(b[2], moments8()[2]);
  EXPECT_NEAR(b[1], std::sqrt(moments8()[2]), 1e-15);
  EXPECT_NEAR(b[1], 0.6483, 1e-4);
  EXPECT_NEAR(b[3], std::pow(moments8()[4], 0.75), 1e-15);
  EXPECT_THROW(abs_moment_bounds(moments8(), 9), std::out_of_range);
}

TEST(PumpMoments, AgreeWithDensityFixedPoint) {
  const auto r = iterate_density(init_gaussian_density(), 60, 1e-6);
  for (int k = 2; k <= 4; ++k)
    EXPECT_NEAR(moments8()[k], r.f.moment(k), 1e-2) << "k = " << k;
}

TEST(PumpMoments, AgreeWithSimulation) {
  const std::int64_t n = 10000;
  const std::uint64_t count = 100000;
  const auto xs = sample_many(n, count, 77);
  const double mu = exact_mean(n);
  double s3 = 0.0, s4 = 0.0, q3 = 0.0, q4 = 0.0;
  for (auto x : xs) {
    const double y = standardize(static_cast<double>(x), n, mu);
    const double y3 = y * y * y, y4 = y3 * y;
    s3 += y3;
    s4 += y4;
    q3 += y3 * y3;
    q4 += y4 * y4;
  }
  const double N = static_cast<double>(count);
  const double m3 = s3 / N, m4 = s4 / N;
  const double se3 = std::sqrt((q3 / N - m3 * m3) / N);
  const double se4 = std::sqrt((q4 / N - m4 * m4) / N);
  EXPECT_NEAR(moments8()[3], m3, 3.0 * se3);
  EXPECT_NEAR(moments8()[4], m4, 3.0 * se4);
}
