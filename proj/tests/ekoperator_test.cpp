#include <gtest/gtest.h>

#include <cmath>

#include "qfrac/ekoperator.hpp"

using namespace qfrac;

namespace {

::testing::AssertionResult rel_near(double actual, double expected, double tol) {
  const double err = std::abs(actual - expected) / std::max(1.0, std::abs(expected));
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << actual << " vs " << expected << " (rel " << err << ")";
}

// Brute-force series: 4000 terms with explicit Pochhammer ratios.
double brute_series(const FunctionSpec& f, double t, double eta, double mu, double beta, double q) {
  double coef = 1.0;
  double sum = 0.0;
  for (int k = 0; k < 4000; ++k) {
    sum += coef * std::pow(q, k * (eta + 1)) * f(t * std::pow(q, k / beta));
    coef *= (1 - std::pow(q, mu + k)) / (1 - std::pow(q, k + 1));
  }
  return beta * (1 - std::pow(q, 1 / beta)) * std::pow(1 - q, mu - 1) * sum;
}

double power_closed_form(double sigma, double t, double eta, double mu, double beta, DeformationParam q) {
  const double c = eta + 1 + sigma / beta;
  return beta * (1 - std::pow(q.value(), 1 / beta)) / (1 - q.value()) * q_gamma(c, q).value /
         q_gamma(c + mu, q).value * std::pow(t, sigma);
}

}  // namespace

TEST(OperatorParams, Validation) {
  EXPECT_NO_THROW(OperatorParams(-0.5, 0.5, 2));
  EXPECT_THROW(OperatorParams(-1.0, 1, 1), InvalidParameter);
  EXPECT_THROW(OperatorParams(0, 0, 1), InvalidParameter);
  EXPECT_THROW(OperatorParams(0, 1, 0), InvalidParameter);
  EXPECT_THROW(OperatorParams(0, 1, -2), InvalidParameter);
}

TEST(EkSeries, ConstantExample) {
  const SeriesResult r = ek_series(FunctionSpec::constant(1), 1.0, OperatorParams(0, 1, 1), DeformationParam(0.5));
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(rel_near(r.value, 1.0, 1e-14));
  EXPECT_EQ(ek_series(FunctionSpec::constant(0), 1.0, OperatorParams(0, 1, 1), DeformationParam(0.5)).value, 0.0);
}

TEST(EkSeries, PowerClosedFormMatchesBruteForce) {
  for (double sigma : {0.0, 1.0, 2.0, 2.5}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const double eta = 0.5, mu = 0.7, t = 2.0, qv = 0.3;
      const DeformationParam q(qv);
      const auto f = FunctionSpec::power(sigma);
      const double brute = brute_series(f, t, eta, mu, beta, qv);
      EXPECT_TRUE(rel_near(power_closed_form(sigma, t, eta, mu, beta, q), brute, 1e-13));
      EXPECT_TRUE(rel_near(ek_series(f, t, OperatorParams(eta, mu, beta), q).value, brute, 1e-13));
    }
  }
}

TEST(EkSeries, TailBoundsError) {
  TruncationPolicy loose;
  loose.rel_tol = 1e-6;
  const auto f = FunctionSpec::power(1);
  const SeriesResult r = ek_series(f, 1.5, OperatorParams(-0.5, 2, 1), DeformationParam(0.8), loose);
  const double exact = brute_series(f, 1.5, -0.5, 2, 1, 0.8);
  EXPECT_LE(std::abs(r.value - exact), r.tail_estimate + 1e-15);
}

TEST(EkIntegral, MatchesSeries) {
  EXPECT_TRUE(rel_near(ek_integral(FunctionSpec::constant(1), 1.0, OperatorParams(0, 1, 1), DeformationParam(0.5)).value, 1.0, 1e-14));
  const OperatorParams p(0.5, 0.7, 2);
  const DeformationParam q(0.3);
  const double s = ek_series(FunctionSpec::power(1), 2.0, p, q).value;
  EXPECT_TRUE(rel_near(ek_integral(FunctionSpec::power(1), 2.0, p, q).value, s, 1e-8));
  EXPECT_EQ(ek_integral(FunctionSpec::constant(0), 2.0, p, q).value, 0.0);
}

TEST(EkIntegral, GridEquivalence) {
  const auto hat = FunctionSpec::piecewise_linear({{0, 0}, {0.5, 1}, {1, 0.25}});
  for (double qv : {0.3, 0.6, 0.9}) {
    for (double eta : {-0.5, 0.0, 1.0}) {
      for (double mu : {0.5, 1.0, 2.0}) {
        for (double beta : {0.5, 1.0, 2.0}) {
          const OperatorParams p(eta, mu, beta);
          const DeformationParam q(qv);
          const double s = ek_series(hat, 1.0, p, q).value;
          const double i = ek_integral(hat, 1.0, p, q).value;
          EXPECT_LE(std::abs(s - i), 1e-8 * std::max(1.0, std::abs(s)));
        }
      }
    }
  }
}

TEST(Kober, Examples) {
  EXPECT_TRUE(rel_near(kober(FunctionSpec::constant(1), 1.0, 0, 1, DeformationParam(0.5)).value, 1.0, 1e-14));
  const DeformationParam q(0.6);
  for (double sigma : {0.0, 1.0, 1.5}) {
    const double eta = 0.25, mu = 1.5, t = 1.3;
    const double closed = q_gamma(eta + 1 + sigma, q).value / q_gamma(eta + mu + 1 + sigma, q).value * std::pow(t, sigma);
    const double brute = brute_series(FunctionSpec::power(sigma), t, eta, mu, 1, 0.6);
    EXPECT_TRUE(rel_near(closed, brute, 1e-13));
    EXPECT_TRUE(rel_near(kober(FunctionSpec::power(sigma), t, eta, mu, q).value, closed, 1e-12));
  }
}

TEST(Kober, EqualsSeriesAtBetaOne) {
  const auto f = FunctionSpec::sum(FunctionSpec::power(2), FunctionSpec::affine(-0.5, 1));
  for (double qv : {0.3, 0.9}) {
    for (double eta : {-0.5, 1.0}) {
      for (double mu : {0.5, 2.0}) {
        const DeformationParam q(qv);
        EXPECT_TRUE(rel_near(kober(f, 1.0, eta, mu, q).value,
                             ek_series(f, 1.0, OperatorParams(eta, mu, 1), q).value, 1e-12));
      }
    }
  }
}

TEST(EkSeries, NonnegativeTermsForNonnegativeInput) {
  const auto f = FunctionSpec::piecewise_linear({{0, 0}, {0.3, 2}, {0.7, 0}, {1, 1}});
  const OperatorTrace tr = ek_series_trace(f, 1.0, OperatorParams(-0.5, 0.5, 0.5), DeformationParam(0.9));
  ASSERT_FALSE(tr.terms.empty());
  for (double term : tr.terms) EXPECT_GE(term, 0.0);
  EXPECT_GE(tr.result.value, 0.0);
  EXPECT_EQ(static_cast<std::int64_t>(tr.terms.size()), tr.result.terms_used);
}

TEST(EkSeries, Linearity) {
  const OperatorParams p(0.3, 1.7, 0.5);
  const DeformationParam q(0.7);
  const auto f = FunctionSpec::power(1.5);
  const auto g = FunctionSpec::affine(-2, 5);
  const double combo = ek_series(FunctionSpec::sum(FunctionSpec::scale(3, f), FunctionSpec::scale(-2, g)), 2.0, p, q).value;
  EXPECT_TRUE(rel_near(combo, 3 * ek_series(f, 2.0, p, q).value - 2 * ek_series(g, 2.0, p, q).value, 1e-13));
}

TEST(EkSeries, MonotoneInIntegrand) {
  const OperatorParams p(0, 0.5, 2);
  const DeformationParam q(0.5);
  const auto f = FunctionSpec::power(1);
  const auto g = FunctionSpec::sum(FunctionSpec::power(1), FunctionSpec::constant(0.01));
  EXPECT_LT(ek_series(f, 1.0, p, q).value, ek_series(g, 1.0, p, q).value);
}

TEST(EkSeries, OrderZeroNormalization) {
  // As mu -> 0 the power closed form tends to beta(1-q^{1/beta})/(1-q) t^sigma.
  const double beta = 2, sigma = 1, t = 1.5, qv = 0.5;
  const double limit = beta * (1 - std::pow(qv, 1 / beta)) / (1 - qv) * std::pow(t, sigma);
  double prev = INFINITY;
  for (double mu : {0.1, 0.01, 0.001}) {
    const double v = ek_series(FunctionSpec::power(sigma), t, OperatorParams(0, mu, beta), DeformationParam(qv)).value;
    const double err = std::abs(v - limit);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(EkWeighted, Examples) {
  const OperatorParams p(0.5, 1.5, 2);
  const DeformationParam q(0.4);
  const auto u = FunctionSpec::affine(1, 2);
  const auto one = FunctionSpec::constant(1);
  EXPECT_TRUE(rel_near(ek_weighted(one, 0, u, 1.2, p, q).value, ek_series(u, 1.2, p, q).value, 1e-14));
  EXPECT_TRUE(rel_near(ek_weighted(one, 3, one, 1.2, p, q).value, power_closed_form(3, 1.2, 0.5, 1.5, 2, q), 1e-13));
  EXPECT_TRUE(rel_near(ek_weighted(one, 1, FunctionSpec::power(1), 1.2, p, q).value,
                       ek_weighted(one, 2, one, 1.2, p, q).value, 1e-14));
  EXPECT_THROW(ek_weighted(one, -1, one, 1.2, p, q), InvalidParameter);
}

TEST(EkSeries, RejectsBadPoint) {
  EXPECT_THROW(ek_series(FunctionSpec::power(1), 0.0, OperatorParams(0, 1, 1), DeformationParam(0.5)), InvalidParameter);
}
