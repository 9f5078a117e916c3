#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "qslimit/envelope_integrals.hpp"
#include "qslimit/quadrature.hpp"

using namespace qslimit;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

DecayBound power(double p, double c) { return {p, c, BoundForm::pure_power, 0.0}; }
}  // namespace

TEST(PieceIntegral, ReferencePieces) {
  EXPECT_DOUBLE_EQ(piece_integral({0.0, 4.0, power(0.0, 1.0)}, 0), 4.0);
  EXPECT_NEAR(piece_integral({4.0, 4.0 * pi * pi, power(0.5, 2.0)}, 0), 4.0 * (2.0 * pi - 2.0), 1e-12);
  EXPECT_NEAR(piece_integral({4.0, 4.0 * pi * pi, power(0.5, 2.0)}, 0), 17.1327, 1e-4);
  const double t5 = 197102280.0 / 103215.0;
  const double v = piece_integral({t5, inf, power(3.5, 197102280.0)}, 0);
  EXPECT_NEAR(v, 0.4 * 197102280.0 * std::pow(t5, -2.5), 1e-12);
  EXPECT_NEAR(v, 0.4947, 1e-4);
}

TEST(PieceIntegral, ClosedFormsMatchQuadrature) {
  const QuadratureSpec spec{1e-11, 20000};
  struct Case {
    EnvelopePiece piece;
    int k;
  };
  const Case cases[] = {
      {{4.0, 39.5, power(0.5, 2.0)}, 0},  {{4.0, 39.5, power(0.5, 2.0)}, 1},
      {{39.5, 221.4, power(1.0, 4.0 * pi)}, 1}, {{39.5, 221.4, power(1.0, 4.0 * pi)}, 0},
      {{221.4, 3000.0, power(1.5, 187.0)}, 2}, {{0.0, 4.0, power(0.0, 1.0)}, 3},
  };
  for (const auto& c : cases) {
    const auto& b = c.piece.bound;
    const double q = integrate([&](double t) { return std::pow(t, c.k) * b(t); }, c.piece.t_lo,
                               c.piece.t_hi, spec);
    const double closed = piece_integral(c.piece, c.k);
    EXPECT_NEAR(closed, q, 1e-8 * std::max(1.0, std::abs(q))) << "p=" << b.p << " k=" << c.k;
  }
}

TEST(PieceIntegral, Divergence) {
  EXPECT_THROW(piece_integral({10.0, inf, power(1.0, 1.0)}, 0), DivergentIntegral);
  EXPECT_THROW(piece_integral({10.0, inf, power(1.5, 1.0)}, 1), DivergentIntegral);
  EXPECT_THROW(piece_integral({0.0, 1.0, power(1.0, 1.0)}, 0), DivergentIntegral);
  EXPECT_THROW(piece_integral({10.0, inf, log_decay_bound()}, 1), DivergentIntegral);
  EXPECT_THROW(piece_integral({1.0, 5.0, log_decay_bound()}, 0), std::domain_error);
}

TEST(PieceIntegral, LogTailConverges) {
  const double a = 50.0;
  const double v = piece_integral({a, inf, log_decay_bound()}, 0);
  // int_a^inf C t^-2 (ln(t/4pi) + 2) dt = C (ln(a/4pi) + 3) / a
  EXPECT_NEAR(v, 32.0 * pi * pi * (std::log(a / (4.0 * pi)) + 3.0) / a, 1e-8);
}

TEST(SupBounds, PlainAndLog) {
  const auto chain = standard_chain(3.5);
  const double plain = sup_fk_bound(make_envelope(chain, false), 0);
  EXPECT_GE(plain, 18.0);
  EXPECT_LE(plain, 18.2);
  EXPECT_NEAR(plain, 18.14, 0.01);
  EXPECT_LT(sup_fk_bound(make_envelope(chain, true), 0), 15.3);
  EXPECT_LT(sup_fk_bound(make_envelope(chain, false), 1), 3652.1);
}

TEST(SupBounds, ReportPiecesSumToTotal) {
  const auto r = sup_fk_report(make_envelope(standard_chain(3.5), true), 0);
  double s = 0.0;
  for (const auto& [pc, v] : r.pieces) {
    EXPECT_GT(v, 0.0);
    s += v;
  }
  EXPECT_NEAR(s, r.total, 1e-12 * r.total);
  EXPECT_TRUE(r.use_log);
}

TEST(SupBounds, ShallowChainDivergesForDerivative) {
  EXPECT_THROW(sup_fk_bound(make_envelope(standard_chain(1.5), false), 1), DivergentIntegral);
}

TEST(MaxfCheck, CeilingsHold) {
  const auto m = maxf_theorem_check();
  EXPECT_LT(m.sup_f, 16.0);
  EXPECT_LT(m.sup_f1, 2466.0);
  EXPECT_GT(m.sup_f1, 0.99 * 2465.9);
  EXPECT_LT(sup_fk_bound(make_envelope(standard_chain(3.5), true), 1), 2492.1);
}
