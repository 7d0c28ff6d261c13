#pragma once

// Both sides of the six two-operator Chebyshev-type inequalities, evaluated
// for one concrete case.
//
// Notation: A{X} is the q1-side operator I^{eta,mu,beta}_{q1} applied to u X,
// B{X} the q2-side operator I^{zeta,nu,delta}_{q2} applied to w X, where w is
// u for T1/T3/T5 and v for T2/T4/T6.

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "qfrac/ekoperator.hpp"
#include "qfrac/functions.hpp"
#include "qfrac/qcore.hpp"

namespace qfrac {

enum class TheoremId { T1 = 1, T2, T3, T4, T5, T6 };

std::string_view to_string(TheoremId id);
TheoremId parse_theorem_id(std::string_view text);

/// T2/T4/T6 take a second weight v for the q2-side operator.
bool uses_second_weight(TheoremId id);

/// Direct: the inequality as stated. Reversed (T1/T2 only): f, g asynchronous
/// and h >= 0, for which LHS <= RHS is expected.
enum class Expectation { direct, reversed };

struct TheoremCase {
  TheoremId theorem;
  double t;
  DeformationParam q1;
  DeformationParam q2;
  OperatorParams p1;  // (eta, mu, beta)
  OperatorParams p2;  // (zeta, nu, delta)
  FunctionSpec u;
  std::optional<FunctionSpec> v;
  FunctionSpec f;
  FunctionSpec g;
  FunctionSpec h;
  std::optional<BoundsTriple> bounds;        // T3/T4
  std::optional<LipschitzTriple> lipschitz;  // T5/T6
  Expectation expect = Expectation::direct;
  TruncationPolicy policy{};
};

enum class Verdict { holds, violated, inconclusive };

std::string_view to_string(Verdict v);

/// Margin multiplier applied to the propagated truncation error.
inline constexpr double kTailSafetyFactor = 10.0;

struct InequalityReport {
  explicit InequalityReport(TheoremCase c) : input(std::move(c)) {}

  TheoremCase input;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Oriented so that margin >= 0 means the expected inequality holds.
  double margin = 0.0;
  Verdict verdict = Verdict::inconclusive;
  /// Largest tail_estimate among the operator evaluations of this case.
  double worst_tail = 0.0;
  /// Distinct operator evaluations (after memoization).
  int operator_evals = 0;
  /// Sum of |product| over every product entering lhs and rhs.
  double scale = 0.0;
  /// kTailSafetyFactor x truncation error propagated through the products,
  /// plus a floating-point summation floor.
  double tol_effective = 0.0;
  /// T5/T6: the moment bracket multiplying L1 L2 L3.
  std::optional<double> bracket;
  bool bracket_nonnegative = true;
  /// Diagnostics (non-convergence, dominant B{g h} A{f} term in T6).
  std::string note;
};

InequalityReport theorem1(const TheoremCase& c);
InequalityReport theorem2(const TheoremCase& c);
InequalityReport theorem3(const TheoremCase& c);
InequalityReport theorem4(const TheoremCase& c);
InequalityReport theorem5(const TheoremCase& c);
InequalityReport theorem6(const TheoremCase& c);

/// Dispatches on c.theorem.
InequalityReport evaluate(const TheoremCase& c);

/// The eight-term kernel
///   f(x)g(x)h(x) + f(y)g(y)h(x) + f(x)g(y)h(y) + f(y)g(x)h(y)
///   - f(x)g(y)h(x) - f(y)g(y)h(y) - f(x)g(x)h(y) - f(y)g(x)h(x)
/// at x = tau, y = rho, written term by term.
double proof_kernel_A(const FunctionSpec& f, const FunctionSpec& g,
                      const FunctionSpec& h, double tau, double rho);

}  // namespace qfrac
