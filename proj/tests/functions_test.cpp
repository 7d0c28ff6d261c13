#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "qfrac/functions.hpp"

using namespace qfrac;

namespace {

std::vector<double> uniform_grid(double T, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(T * i / (n - 1));
  return g;
}

}  // namespace

TEST(FunctionSpec, EvalExamples) {
  EXPECT_EQ(FunctionSpec::power(2).eval(3.0), 9.0);
  EXPECT_EQ(FunctionSpec::product(FunctionSpec::power(1), FunctionSpec::constant(2)).eval(4.0), 8.0);
  const auto pl = FunctionSpec::piecewise_linear({{0, 0}, {1, 1}, {2, 1.5}});
  EXPECT_DOUBLE_EQ(pl.eval(1.5), 1.25);
  EXPECT_DOUBLE_EQ(pl.eval(5.0), 1.5);
  EXPECT_DOUBLE_EQ(FunctionSpec::affine(-1, 5).eval(2.0), 3.0);
  EXPECT_DOUBLE_EQ(FunctionSpec::scale(-2, FunctionSpec::power(0.5)).eval(4.0), -4.0);
  EXPECT_EQ(FunctionSpec::power(0).eval(0.0), 1.0);
}

TEST(FunctionSpec, DomainErrors) {
  EXPECT_THROW(FunctionSpec::power(1).eval(-1.0), DomainError);
  EXPECT_THROW(FunctionSpec::power(1).eval(std::nan("")), DomainError);
  EXPECT_THROW(FunctionSpec::power(-1.0), InvalidParameter);
  EXPECT_THROW(FunctionSpec::piecewise_linear({}), InvalidParameter);
  EXPECT_THROW(FunctionSpec::piecewise_linear({{1, 0}, {0, 1}}), InvalidParameter);
}

TEST(FunctionSpec, ParseExamples) {
  EXPECT_EQ(FunctionSpec::parse("(const 1)").eval(3.0), 1.0);
  EXPECT_EQ(FunctionSpec::parse("  (product (power 1) (const 2))").eval(4.0), 8.0);
  EXPECT_DOUBLE_EQ(FunctionSpec::parse("(piecewise_linear (0 0) (1 1) (2 1.5))").eval(1.5), 1.25);
  for (const char* bad : {"", "(", "(const)", "(power -1)", "(bogus 1)", "(const 1) x",
                          "(sum (const 1))", "(affine 1 2 3)", "(const abc)"}) {
    EXPECT_THROW(FunctionSpec::parse(bad), ParseError) << bad;
  }
}

TEST(FunctionSpec, ParseRoundTripOnRandomTrees) {
  std::mt19937_64 eng(12345);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::function<FunctionSpec(int)> build = [&](int depth) -> FunctionSpec {
    const int kind = static_cast<int>(eng() % (depth > 0 ? 7 : 4));
    switch (kind) {
      case 0: return FunctionSpec::constant(coef(eng));
      case 1: return FunctionSpec::power(std::abs(coef(eng)));
      case 2: return FunctionSpec::affine(coef(eng), coef(eng));
      case 3: {
        std::vector<Knot> k;
        double x = 0.0;
        for (int i = 0; i < 4; ++i) {
          x += 0.1 + std::abs(coef(eng));
          k.push_back({x, coef(eng)});
        }
        return FunctionSpec::piecewise_linear(k);
      }
      case 4: return FunctionSpec::product(build(depth - 1), build(depth - 1));
      case 5: return FunctionSpec::sum(build(depth - 1), build(depth - 1));
      default: return FunctionSpec::scale(coef(eng), build(depth - 1));
    }
  };
  for (int i = 0; i < 300; ++i) {
    const FunctionSpec s = build(3);
    const FunctionSpec back = FunctionSpec::parse(s.to_string());
    EXPECT_EQ(back.to_string(), s.to_string());
    for (double t : {0.0, 0.3, 1.7, 4.0}) {
      const double a = s.eval(t);
      const double b = back.eval(t);
      if (std::isnan(a)) {
        EXPECT_TRUE(std::isnan(b));
      } else {
        EXPECT_EQ(a, b);
      }
    }
  }
}

TEST(FunctionSpec, Metadata) {
  EXPECT_EQ(FunctionSpec::power(2).metadata().monotonicity, Monotonicity::increasing);
  EXPECT_EQ(FunctionSpec::affine(-1, 5).metadata().monotonicity, Monotonicity::decreasing);
  EXPECT_EQ(FunctionSpec::constant(3).metadata().monotonicity, Monotonicity::constant);
  EXPECT_EQ(FunctionSpec::power(2).metadata().c_lambda_exponent, 2.0);
  EXPECT_TRUE(std::isinf(FunctionSpec::power(1).metadata().domain_hint));
  EXPECT_EQ(FunctionSpec::power(1).with_domain(2.0).metadata().domain_hint, 2.0);
  // t(1 - t) increases only on [0, 1/2].
  const auto hump = FunctionSpec::product(FunctionSpec::power(1), FunctionSpec::affine(-1, 1));
  EXPECT_EQ(hump.monotonicity_on(2.0), Monotonicity::none);
  EXPECT_TRUE(check_c_lambda(FunctionSpec::power(1.5)));
  EXPECT_TRUE(check_c_lambda(FunctionSpec::product(FunctionSpec::power(1), FunctionSpec::affine(1, 2))));
}

TEST(FunctionSpec, EnclosureContainsSamples) {
  const auto f = FunctionSpec::sum(FunctionSpec::scale(-1.5, FunctionSpec::power(2)),
                                   FunctionSpec::product(FunctionSpec::affine(2, -1),
                                                         FunctionSpec::power(0.5)));
  const Interval box = f.enclose(0.0, 3.0);
  for (double t : uniform_grid(3.0, 301)) {
    EXPECT_LE(box.lo, f(t));
    EXPECT_GE(box.hi, f(t));
  }
}

TEST(Synchronous, Examples) {
  const auto grid = uniform_grid(2.0, 65);
  EXPECT_EQ(check_synchronous(FunctionSpec::power(1), FunctionSpec::power(1), grid).classification,
            SyncClass::synchronous);
  EXPECT_EQ(check_synchronous(FunctionSpec::power(1), FunctionSpec::affine(-1, 5), grid).classification,
            SyncClass::asynchronous);

  const auto hat = FunctionSpec::piecewise_linear({{0, 0}, {1, 1}, {2, 0}});
  const SyncResult r = check_synchronous(FunctionSpec::power(2), hat, grid);
  EXPECT_EQ(r.classification, SyncClass::neither);
  ASSERT_TRUE(r.witness.has_value());
  const auto [x, y] = *r.witness;
  const double prod = (x * x - y * y) * (hat(x) - hat(y));
  EXPECT_LT(prod, -kSyncTolerance);
  EXPECT_THROW(check_synchronous(FunctionSpec::power(1), hat, std::vector<double>{}), InvalidParameter);
}

TEST(Synchronous, ConstantsAreBoth) {
  const auto grid = uniform_grid(1.0, 9);
  EXPECT_EQ(check_synchronous(FunctionSpec::constant(2), FunctionSpec::affine(-1, 1), grid).classification,
            SyncClass::synchronous);
}

TEST(Bounds, Examples) {
  const Bounds b = extract_bounds(FunctionSpec::power(2), 2.0);
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_EQ(b.upper, 4.0);
  EXPECT_TRUE(b.exact);
  const Bounds c = extract_bounds(FunctionSpec::constant(3), 5.0);
  EXPECT_EQ(c.lower, 3.0);
  EXPECT_EQ(c.upper, 3.0);
  const Bounds d = extract_bounds(FunctionSpec::affine(-2, 10), 3.0);
  EXPECT_EQ(d.lower, 4.0);
  EXPECT_EQ(d.upper, 10.0);
  const Bounds pl = extract_bounds(FunctionSpec::piecewise_linear({{0, 1}, {1, -2}, {3, 4}}), 2.0);
  EXPECT_TRUE(pl.exact);
  EXPECT_EQ(pl.lower, -2.0);
  EXPECT_EQ(pl.upper, 1.0);
}

TEST(Bounds, GridFallbackForNonMonotone) {
  const auto hump = FunctionSpec::product(FunctionSpec::power(1), FunctionSpec::affine(-1, 1));
  const Bounds b = extract_bounds(hump, 1.0);
  EXPECT_FALSE(b.exact);
  EXPECT_EQ(b.grid_points, kBoundsGridPoints);
  EXPECT_NEAR(b.upper, 0.25, 1e-12);
  EXPECT_NEAR(b.lower, 0.0, 1e-12);
}

TEST(Lipschitz, Examples) {
  EXPECT_DOUBLE_EQ(extract_lipschitz(FunctionSpec::affine(3, 1), 10.0), 3.0);
  EXPECT_DOUBLE_EQ(extract_lipschitz(FunctionSpec::power(2), 2.0), 4.0);
  EXPECT_THROW(extract_lipschitz(FunctionSpec::power(0.5), 1.0), NotLipschitz);
  EXPECT_THROW(extract_lipschitz(FunctionSpec::power(2), INFINITY), NotLipschitz);
  EXPECT_DOUBLE_EQ(extract_lipschitz(FunctionSpec::piecewise_linear({{0, 0}, {1, 2}, {2, 1}}), 2.0), 2.0);
  EXPECT_EQ(extract_lipschitz(FunctionSpec::constant(5), 1.0), 0.0);
}

TEST(Lipschitz, ProductRuleBoundsDifferenceQuotients) {
  const auto f = FunctionSpec::product(FunctionSpec::power(2), FunctionSpec::affine(-0.5, 2));
  const double L = extract_lipschitz(f, 2.0);
  const auto grid = uniform_grid(2.0, 201);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); j += 7) {
      EXPECT_LE(std::abs(f(grid[i]) - f(grid[j])), L * (grid[j] - grid[i]) * (1 + 1e-12));
    }
  }
}
