#include <gtest/gtest.h>

#include <cmath>

#include "qfrac/jackson.hpp"

using namespace qfrac;

namespace {

::testing::AssertionResult rel_near(double actual, double expected, double tol) {
  const double err = std::abs(actual - expected) / std::max(1.0, std::abs(expected));
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << actual << " vs " << expected << " (rel " << err << ")";
}

}  // namespace

TEST(QDerivative, Examples) {
  EXPECT_DOUBLE_EQ(q_derivative(FunctionSpec::power(1), 3.0, DeformationParam(0.5)), 1.0);
  EXPECT_DOUBLE_EQ(q_derivative(FunctionSpec::power(2), 2.0, DeformationParam(0.5)), 3.0);
  EXPECT_EQ(q_derivative(FunctionSpec::constant(7), 1.0, DeformationParam(0.9)), 0.0);
  EXPECT_THROW(q_derivative(FunctionSpec::power(1), 0.0, DeformationParam(0.5)), InvalidParameter);
  EXPECT_DOUBLE_EQ(q_derivative([](double t) { return t * t * t; }, 1.0, DeformationParam(0.5)),
                   1.0 + 0.5 + 0.25);
}

TEST(QGridSample, Nodes) {
  const QGridSample s = sample_q_grid(FunctionSpec::power(1), 2.0, DeformationParam(0.5), 4);
  ASSERT_EQ(s.values.size(), 4u);
  EXPECT_EQ(s.values[3].first, 0.25);
  EXPECT_EQ(s.values[3].second, 0.25);
}

TEST(JacksonIntegral, Examples) {
  EXPECT_TRUE(rel_near(jackson_integral(FunctionSpec::constant(1), 1.0, DeformationParam(0.5)).value, 1.0, 1e-14));
  EXPECT_TRUE(rel_near(jackson_integral(FunctionSpec::power(1), 1.0, DeformationParam(0.5)).value, 2.0 / 3.0, 1e-14));
  EXPECT_TRUE(rel_near(jackson_integral(FunctionSpec::power(2), 2.0, DeformationParam(0.5)).value, 8.0 * 4.0 / 7.0, 1e-14));
  EXPECT_EQ(jackson_integral(FunctionSpec::constant(0), 1.0, DeformationParam(0.5)).value, 0.0);
}

TEST(JacksonIntegral, PowerClosedForms) {
  for (int k = 0; k <= 5; ++k) {
    for (double b : {0.5, 1.0, 2.0}) {
      for (double qv : {0.3, 0.6, 0.9}) {
        const double exact = std::pow(b, k + 1) * (1 - qv) / (1 - std::pow(qv, k + 1));
        const SeriesResult r = jackson_integral(FunctionSpec::power(k), b, DeformationParam(qv));
        EXPECT_TRUE(r.converged);
        EXPECT_TRUE(rel_near(r.value, exact, 1e-12)) << k << ' ' << b << ' ' << qv;
        EXPECT_LE(std::abs(r.value - exact), r.tail_estimate + 1e-14 * std::abs(exact));
      }
    }
  }
}

TEST(JacksonIntegral, ClassicalLimit) {
  // Error beyond the reported truncation bound; for k = 0 the q-integral is
  // exact and only the truncation remainder is left.
  for (int k = 0; k <= 3; ++k) {
    double prev = INFINITY;
    for (double qv : {0.9, 0.99, 0.999}) {
      const SeriesResult r = jackson_integral(FunctionSpec::power(k), 1.0, DeformationParam(qv));
      const double err = std::max(0.0, std::abs(r.value - 1.0 / (k + 1)) - r.tail_estimate);
      if (k == 0) {
        EXPECT_EQ(err, 0.0);
      } else {
        EXPECT_LT(err, prev);
      }
      prev = err;
    }
  }
}

TEST(JacksonIntegral, SurvivesInteriorZero) {
  // f vanishes at t = 1/2 and the early nodes there are small; the sum must
  // not stop on them.
  const auto f = FunctionSpec::piecewise_linear({{0, 1}, {0.5, 0}, {1, 0}});
  const SeriesResult r = jackson_integral(f, 1.0, DeformationParam(0.5));
  double brute = 0.0;
  for (int j = 0; j < 200; ++j) brute += 0.5 * std::pow(0.5, j) * f(std::pow(0.5, j));
  EXPECT_TRUE(rel_near(r.value, brute, 1e-14));
}

TEST(JacksonIntegral, Linearity) {
  const DeformationParam q(0.7);
  const auto f = FunctionSpec::power(1.5);
  const auto g = FunctionSpec::affine(-1, 3);
  const double lhs = jackson_integral(FunctionSpec::sum(FunctionSpec::scale(2, f), FunctionSpec::scale(-3, g)), 1.3, q).value;
  const double rhs = 2 * jackson_integral(f, 1.3, q).value - 3 * jackson_integral(g, 1.3, q).value;
  EXPECT_TRUE(rel_near(lhs, rhs, 1e-13));
}

TEST(JacksonIntegral, FundamentalTheorem) {
  // int_0^b D_q F d_q t = F(b) - F(0).
  const DeformationParam q(0.6);
  const auto F = FunctionSpec::sum(FunctionSpec::power(3), FunctionSpec::affine(2, 1));
  // D_q t^3 = [3]_q t^2, D_q (2t + 1) = 2.
  const double q3 = 1 + 0.6 + 0.36;
  const auto DF = FunctionSpec::sum(FunctionSpec::scale(q3, FunctionSpec::power(2)), FunctionSpec::constant(2));
  for (double t : {0.4, 1.0, 1.7}) EXPECT_NEAR(DF(t), q_derivative(F, t, q), 1e-12);
  EXPECT_TRUE(rel_near(jackson_integral(DF, 1.5, q).value, F(1.5) - F(0.0), 1e-13));
}

TEST(JacksonIntegralAB, Examples) {
  const DeformationParam q(0.5);
  EXPECT_TRUE(rel_near(jackson_integral_ab(FunctionSpec::constant(1), 1.0, 2.0, q).value, 1.0, 1e-14));
  EXPECT_TRUE(rel_near(jackson_integral_ab(FunctionSpec::power(1), 1.0, 2.0, q).value, 2.0, 1e-14));
  EXPECT_EQ(jackson_integral_ab(FunctionSpec::power(1), 1.3, 1.3, q).value, 0.0);
  EXPECT_TRUE(rel_near(jackson_integral_ab(FunctionSpec::power(1), 2.0, 1.0, q).value, -2.0, 1e-14));
}

TEST(JacksonStieltjes, Examples) {
  const DeformationParam q(0.5);
  const auto f = FunctionSpec::product(FunctionSpec::power(2), FunctionSpec::affine(1, 1));
  EXPECT_TRUE(rel_near(jackson_stieltjes(f, FunctionSpec::power(1), 1.7, q).value,
                       jackson_integral(f, 1.7, q).value, 1e-12));
  const auto g = FunctionSpec::product(FunctionSpec::power(1.5), FunctionSpec::affine(0.5, 2));
  EXPECT_TRUE(rel_near(jackson_stieltjes(FunctionSpec::constant(1), g, 1.4, q).value, g(1.4), 1e-13));
  EXPECT_TRUE(rel_near(jackson_stieltjes(FunctionSpec::power(1), FunctionSpec::power(1), 1.0, q).value,
                       0.5 / 0.75, 1e-14));
}
