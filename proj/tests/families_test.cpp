#include <gtest/gtest.h>

#include <cmath>
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

TEST(Families, SynchronousTriple) {
  const auto grid = uniform_grid(2.0, 65);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Family fam = generate_family(FamilyKind::synchronous_triple, seed, 2.0);
    for (const FunctionSpec* s : {&fam.f, &fam.g, &fam.h}) {
      const Monotonicity m = s->metadata().monotonicity;
      EXPECT_TRUE(m == Monotonicity::increasing || m == Monotonicity::constant) << s->to_string();
      EXPECT_GE(s->enclose(0.0, 2.0).lo, 0.0);
    }
    EXPECT_EQ(check_synchronous(fam.f, fam.g, grid).classification, SyncClass::synchronous);
    EXPECT_EQ(check_synchronous(fam.f, fam.h, grid).classification, SyncClass::synchronous);
    EXPECT_EQ(check_synchronous(fam.g, fam.h, grid).classification, SyncClass::synchronous);
  }
}

TEST(Families, AsynchronousPair) {
  const auto grid = uniform_grid(1.0, 65);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Family fam = generate_family(FamilyKind::asynchronous_pair_plus_nonneg, seed, 1.0);
    EXPECT_EQ(check_synchronous(fam.f, fam.g, grid).classification, SyncClass::asynchronous);
    for (double t : grid) EXPECT_GE(fam.h(t), 0.0);
  }
}

TEST(Families, BoundedTripleBoundsHoldOnGrid) {
  const Family fam = generate_family(FamilyKind::bounded_triple, 2, 1.0);
  ASSERT_TRUE(fam.bounds.has_value());
  const BoundsTriple& b = *fam.bounds;
  for (double t : uniform_grid(1.0, 1001)) {
    EXPECT_LE(b.psi, fam.f(t));
    EXPECT_GE(b.Psi, fam.f(t));
    EXPECT_LE(b.phi, fam.g(t));
    EXPECT_GE(b.Phi, fam.g(t));
    EXPECT_LE(b.omega, fam.h(t));
    EXPECT_GE(b.Omega, fam.h(t));
  }
}

TEST(Families, LipschitzTripleOnRandomPairs) {
  const Family fam = generate_family(FamilyKind::lipschitz_triple, 3, 1.0);
  ASSERT_TRUE(fam.lipschitz.has_value());
  const LipschitzTriple& L = *fam.lipschitz;
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = unit(eng);
    const double y = unit(eng);
    const double d = std::abs(x - y) * (1 + 1e-12) + 1e-15;
    EXPECT_LE(std::abs(fam.f(x) - fam.f(y)), L.L1 * d);
    EXPECT_LE(std::abs(fam.g(x) - fam.g(y)), L.L2 * d);
    EXPECT_LE(std::abs(fam.h(x) - fam.h(y)), L.L3 * d);
  }
}

TEST(Families, DeterministicInSeed) {
  for (FamilyKind kind : {FamilyKind::synchronous_triple, FamilyKind::asynchronous_pair_plus_nonneg,
                          FamilyKind::bounded_triple, FamilyKind::lipschitz_triple}) {
    const Family a = generate_family(kind, 42, 1.5);
    const Family b = generate_family(kind, 42, 1.5);
    EXPECT_EQ(a.f.to_string(), b.f.to_string());
    EXPECT_EQ(a.g.to_string(), b.g.to_string());
    EXPECT_EQ(a.h.to_string(), b.h.to_string());
    EXPECT_EQ(parse_family_kind(to_string(kind)), kind);
  }
  EXPECT_NE(generate_family(FamilyKind::synchronous_triple, 1, 1.0).f.to_string() +
                generate_family(FamilyKind::synchronous_triple, 1, 1.0).g.to_string(),
            generate_family(FamilyKind::synchronous_triple, 2, 1.0).f.to_string() +
                generate_family(FamilyKind::synchronous_triple, 2, 1.0).g.to_string());
  EXPECT_THROW(parse_family_kind("nope"), ParseError);
}

TEST(Families, WeightsAreNonnegative) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FunctionSpec u = generate_weight(seed, 2.0);
    EXPECT_GE(u.enclose(0.0, 2.0).lo, 0.0) << u.to_string();
  }
}

TEST(Families, MixSeedSpreads) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}
