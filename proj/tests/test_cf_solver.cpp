#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "qslimit/cf_bounds.hpp"
#include "qslimit/cf_solver.hpp"
#include "qslimit/moments.hpp"

using namespace qslimit;

namespace {

const CfIteration& fixed_point() {
  static const CfIteration r = iterate_cf(init_gaussian_cf(200.0, 4096), 200, 1e-8);
  return r;
}

}  // namespace

TEST(CfGrid, Invariants) {
  EXPECT_THROW(CfGrid(ComplexGrid(0.1, 0.1, {1.0, 0.5})), std::invalid_argument);
  EXPECT_THROW(CfGrid(ComplexGrid(0.0, 0.1, {0.9, 0.5})), std::invalid_argument);
  EXPECT_THROW(CfGrid(ComplexGrid(0.0, 0.1, {1.0, 1.1})), std::invalid_argument);
  EXPECT_THROW(CfGrid(ComplexGrid(0.0, 0.1, {1.0})), std::invalid_argument);
}

TEST(CfGrid, GaussianInit) {
  const auto g = init_gaussian_cf(10.0, 1001);
  EXPECT_EQ(g[0], std::complex<double>(1.0, 0.0));
  EXPECT_NEAR(g.at(1.0).real(), std::exp(-0.5 * kLimitVariance), 1e-12);
  EXPECT_NEAR(g.at(1.0).real(), 0.8105, 1e-4);
  EXPECT_DOUBLE_EQ(g.at(1.0).imag(), 0.0);
}

TEST(CfGrid, InterpolationUsesConjugateSymmetry) {
  // e^{i mu t} e^{-t^2/2}: the cubic through the ghost point conj(phi(dt))
  // reproduces the odd imaginary part near 0.
  const double mu = 0.3;
  auto exact = [mu](double t) { return std::polar(std::exp(-0.5 * t * t), mu * t); };
  const auto g = cf_from_function(5.0, 501, exact);
  for (double t : {0.001, 0.005, 0.013, 1.234, 4.999}) {
    EXPECT_LT(std::abs(g.at(t) - exact(t)), 1e-8) << "t = " << t;
  }
  EXPECT_NEAR(g.mean_estimate(), mu, 1e-6);
  EXPECT_THROW(g.at(5.1), std::out_of_range);
  EXPECT_THROW(g.at(-0.1), std::out_of_range);
}

TEST(CfGrid, RecenterRemovesTranslation) {
  const double mu = -0.2;
  const auto g = cf_from_function(10.0, 1001, [mu](double t) {
    return std::polar(std::exp(-0.5 * kLimitVariance * t * t), mu * t);
  });
  const auto r = recenter(g);
  for (std::size_t i = 0; i < r.size(); i += 50) EXPECT_NEAR(r[i].imag(), 0.0, 1e-6);
}

TEST(CfMap, ConstantInputGivesOscillatoryIntegral) {
  const auto one = cf_from_function(50.0, 51, [](double) { return std::complex<double>(1.0); });
  const QuadratureSpec spec{1e-12, 4000};
  const auto out = cf_map(one, spec);
  EXPECT_EQ(out[0], std::complex<double>(1.0));
  for (std::size_t i = 1; i < out.size(); i += 7) {
    const double t = out.grid().point(i);
    EXPECT_LT(std::abs(out[i] - vdc_cf(0.0, 0.0, t, spec)), 1e-9) << "t = " << t;
  }
}

TEST(IterateCf, ConvergesFromGaussian) {
  const auto& r = fixed_point();
  EXPECT_LT(r.final_diff, 1e-8);
  EXPECT_LE(r.iterations, 200);
  EXPECT_EQ(r.diff_history.size(), static_cast<std::size_t>(r.iterations));
}

TEST(IterateCf, FixedPointRespectsBounds) {
  const auto& phi = fixed_point().phi;
  const auto env = make_envelope(standard_chain(4.5), true);
  for (std::size_t i = 1; i < phi.size(); ++i) {
    const double t = phi.grid().point(i);
    const double m = std::abs(phi[i]);
    ASSERT_LE(m, std::min(1.0, 2.0 / std::sqrt(t)) + 1e-6) << "t = " << t;
    ASSERT_LE(m, env(t) + 1e-6) << "t = " << t;
  }
}

TEST(IterateCf, CurvatureAtZeroIsVariance) {
  const auto& phi = fixed_point().phi;
  const double dt = phi.dt();
  // phi(-dt) = conj(phi(dt)), so the central difference uses 2 Re phi(dt).
  const double second = 2.0 * (phi[1].real() - 1.0) / (dt * dt);
  const auto ms = pump_moments(2);
  EXPECT_NEAR(-second, ms[2], 1e-3);
  EXPECT_NEAR(phi[1].imag() / dt, 0.0, 1e-4);
}

TEST(IterateCf, UniformStartReachesSameFixedPoint) {
  const auto r = iterate_cf(init_uniform_cf(200.0, 4096), 200, 1e-8);
  const auto& ref = fixed_point().phi;
  double sup = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) sup = std::max(sup, std::abs(r.phi[i] - ref[i]));
  EXPECT_LT(sup, 1e-6);
}

TEST(IterateCf, ReportsNonConvergence) {
  try {
    iterate_cf(init_gaussian_cf(50.0, 512), 2, 1e-14);
    FAIL() << "expected CfNonConvergence";
  } catch (const CfNonConvergence& e) {
    EXPECT_EQ(e.history().size(), 2u);
  }
  EXPECT_THROW(iterate_cf(init_gaussian_cf(50.0, 512), 2, 0.0), std::invalid_argument);
}

TEST(InvertCf, DensityProperties) {
  const auto f = invert_cf(fixed_point().phi, 0, -4.0, 0.005, 2001);
  RealGrid g = f;
  EXPECT_NEAR(trapezoid(g), 1.0, 2e-3);
  double mn = 1e300, mx = -1e300;
  for (std::size_t i = 0; i < f.size(); ++i) {
    mn = std::min(mn, f[i]);
    mx = std::max(mx, f[i]);
    const double x = f.point(i);
    if (x >= -1.0 && x <= 3.0) EXPECT_GT(f[i], 0.0) << "x = " << x;
  }
  EXPECT_GT(mn, -1e-4);
  EXPECT_GT(mx, 0.55);
  EXPECT_LT(mx, 0.75);
}

TEST(InvertCf, DerivativeMatchesFiniteDifference) {
  const double dx = 0.005;
  const auto f = invert_cf(fixed_point().phi, 0, -4.0, dx, 2001);
  const auto f1 = invert_cf(fixed_point().phi, 1, -4.0, dx, 2001);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const double x = f.point(i);
    if (x < -3.0 || x > 5.0) continue;
    const double fd = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    EXPECT_NEAR(f1[i], fd, 1e-3) << "x = " << x;
  }
}

TEST(InvertCf, RefusesTruncatedTransform) {
  EXPECT_THROW(invert_cf(init_gaussian_cf(5.0, 256), 0, -1.0, 0.1, 21), std::runtime_error);
  EXPECT_THROW(invert_cf(fixed_point().phi, -1, -1.0, 0.1, 21), std::domain_error);
}
