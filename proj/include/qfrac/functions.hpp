#pragma once

// A closed expression language for real functions on [0, inf).
//
// Grammar (s-expression form):
//   (const c) | (power p) | (affine a b) | (piecewise_linear (x y) ...)
//   | (product e1 e2) | (sum e1 e2) | (scale c e)
// power requires p >= 0 and affine(a, b) is a*t + b. A piecewise-linear
// function interpolates its knots and is constant outside them.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfrac/errors.hpp"

namespace qfrac {

/// Non-strict monotonicity on the certification domain. `constant` is both
/// increasing and decreasing.
enum class Monotonicity { increasing, decreasing, constant, none };

std::string_view to_string(Monotonicity m);

struct Knot {
  double x;
  double y;
};

/// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo;
  double hi;
};

class FunctionSpec {
 public:
  enum class Kind { constant, power, affine, piecewise_linear, product, sum, scale };

  struct Metadata {
    Monotonicity monotonicity = Monotonicity::none;
    /// Order p of the factorization f(t) = t^p phi(t) near 0 (infinite for
    /// the zero function).
    double c_lambda_exponent = 0.0;
    /// Right end T of the certification domain [0, T].
    double domain_hint = 0.0;
  };

  static FunctionSpec constant(double c);
  static FunctionSpec power(double p);
  static FunctionSpec affine(double slope, double intercept);
  static FunctionSpec piecewise_linear(std::vector<Knot> knots);
  static FunctionSpec product(const FunctionSpec& a, const FunctionSpec& b);
  static FunctionSpec sum(const FunctionSpec& a, const FunctionSpec& b);
  static FunctionSpec scale(double c, const FunctionSpec& e);

  /// Parses the canonical s-expression form. Throws ParseError.
  static FunctionSpec parse(std::string_view text);

  /// Canonical s-expression; parse(to_string()) reproduces the expression
  /// bit for bit.
  std::string to_string() const;

  /// Throws DomainError for t < 0 or NaN.
  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  Kind kind() const noexcept;
  const Metadata& metadata() const noexcept { return meta_; }

  /// Same expression with metadata recertified on [0, T].
  FunctionSpec with_domain(double T) const;

  /// Interval enclosure of the function over [lo, hi] (interval arithmetic
  /// on the expression tree; exact for the leaf kinds).
  Interval enclose(double lo, double hi) const;

  /// Monotonicity certified on [0, T] by the construction rules.
  Monotonicity monotonicity_on(double T) const;

  // Leaf accessors, valid for the matching kind only.
  double param_a() const noexcept;
  double param_b() const noexcept;
  std::span<const Knot> knots() const noexcept;
  const FunctionSpec& left() const noexcept;
  const FunctionSpec& right() const noexcept;

  friend bool operator==(const FunctionSpec& a, const FunctionSpec& b) {
    return a.to_string() == b.to_string();
  }

  struct Node;

 private:
  explicit FunctionSpec(std::shared_ptr<const Node> node, double domain);

  std::shared_ptr<const Node> node_;
  Metadata meta_;
};

/// Verifies the declared C_lambda exponent: t^(-p) f(t) stays bounded as
/// t -> 0 along t = 2^-k.
bool check_c_lambda(const FunctionSpec& spec);

enum class SyncClass { synchronous, asynchronous, neither };

std::string_view to_string(SyncClass c);

struct SyncResult {
  SyncClass classification = SyncClass::neither;
  /// Pair (x, y) with (f(x)-f(y))(g(x)-g(y)) < -tol when synchronicity fails.
  std::optional<std::pair<double, double>> witness;
  /// True when the answer came from certified monotonicity metadata.
  bool certified = false;
};

inline constexpr double kSyncTolerance = 1e-14;

/// Classifies f, g over the grid. Certified monotone pairs short-circuit the
/// O(n^2) pair scan when the grid lies inside their certification domain.
SyncResult check_synchronous(const FunctionSpec& f, const FunctionSpec& g,
                             std::span<const double> grid);

struct Bounds {
  double lower;
  double upper;
  /// True for monotone and piecewise-linear specs (endpoint/knot values).
  bool exact;
  /// Number of grid points used when not exact.
  int grid_points = 0;
};

inline constexpr int kBoundsGridPoints = 4097;

Bounds extract_bounds(const FunctionSpec& spec, double T);

/// Certified Lipschitz constant on [0, T]. Throws NotLipschitz for
/// power(p) with 0 < p < 1, or power(p > 1) on an unbounded domain.
double extract_lipschitz(const FunctionSpec& spec, double T);

// ---------------------------------------------------------------------------
// Seeded family generation.

struct BoundsTriple {
  double psi, Psi;      // f
  double phi, Phi;      // g
  double omega, Omega;  // h
};

struct LipschitzTriple {
  double L1, L2, L3;
};

enum class FamilyKind {
  synchronous_triple,
  asynchronous_pair_plus_nonneg,
  bounded_triple,
  lipschitz_triple,
};

std::string_view to_string(FamilyKind k);
FamilyKind parse_family_kind(std::string_view name);

struct Family {
  FunctionSpec f, g, h;
  std::optional<BoundsTriple> bounds;
  std::optional<LipschitzTriple> lipschitz;
};

/// Deterministic in (kind, seed, T) on every platform: the generator draws
/// from a 64-bit integer-state engine and only uses dyadic rationals.
Family generate_family(FamilyKind kind, std::uint64_t seed, double T);

/// A nonnegative weight function on [0, T] for the u / v slots.
FunctionSpec generate_weight(std::uint64_t seed, double T);

/// splitmix64-style combination used to derive per-case seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qfrac
