#include "qfrac/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace qfrac {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

enum Side { q1_side = 1, q2_side = 2 };

// Products of f, g, h that appear inside the operators.
enum class Mono { one, f, g, h, fg, fh, gh, fgh };

std::vector<double> uniform_grid(double t, int n) {
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = t * i / (n - 1);
  return grid;
}

void require_nonnegative(const FunctionSpec& w, double t, const char* name) {
  if (w.enclose(0.0, t).lo >= 0.0) return;
  for (double x : uniform_grid(t, 1025)) {
    if (w.eval(x) < -1e-14) {
      throw HypothesisViolated(std::string("weight ") + name + " is negative on [0, t]");
    }
  }
}

struct Accumulator {
  double value = 0.0;
  double abs_sum = 0.0;
  double error = 0.0;

  void add(double coef, const SeriesResult& x, const SeriesResult& y) {
    const double p = coef * x.value * y.value;
    value += p;
    abs_sum += std::abs(p);
    error += std::abs(coef) * (std::abs(x.value) * y.tail_estimate +
                               std::abs(y.value) * x.tail_estimate +
                               x.tail_estimate * y.tail_estimate);
  }
};

class CaseEvaluator {
 public:
  explicit CaseEvaluator(const TheoremCase& c)
      : c_(c),
        second_weight_(uses_second_weight(c.theorem) ? *c.v : c.u),
        fg_(FunctionSpec::product(c.f, c.g)),
        fh_(FunctionSpec::product(c.f, c.h)),
        gh_(FunctionSpec::product(c.g, c.h)),
        fgh_(FunctionSpec::product(fg_, c.h)) {}

  const SeriesResult& A(Mono m) { return op(q1_side, integrand(c_.u, m)); }
  const SeriesResult& B(Mono m) { return op(q2_side, integrand(second_weight_, m)); }

  /// Operator of s^k w(s) on the given side, built exactly as ek_weighted does.
  const SeriesResult& moment(Side side, int k) {
    static const FunctionSpec one = FunctionSpec::constant(1.0);
    const FunctionSpec& w = side == q1_side ? c_.u : second_weight_;
    return op(side, weighted_integrand(one, k, w));
  }

  double worst_tail() const { return worst_tail_; }
  int evals() const { return static_cast<int>(memo_.size()); }
  std::int64_t max_terms() const { return max_terms_; }

 private:
  FunctionSpec integrand(const FunctionSpec& w, Mono m) const {
    switch (m) {
      case Mono::one: return w;
      case Mono::f: return FunctionSpec::product(w, c_.f);
      case Mono::g: return FunctionSpec::product(w, c_.g);
      case Mono::h: return FunctionSpec::product(w, c_.h);
      case Mono::fg: return FunctionSpec::product(w, fg_);
      case Mono::fh: return FunctionSpec::product(w, fh_);
      case Mono::gh: return FunctionSpec::product(w, gh_);
      case Mono::fgh: return FunctionSpec::product(w, fgh_);
    }
    return w;
  }

  const SeriesResult& op(Side side, const FunctionSpec& integrand) {
    auto key = std::make_pair(static_cast<int>(side), integrand.to_string());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const SeriesResult r =
        side == q1_side ? ek_series(integrand, c_.t, c_.p1, c_.q1, c_.policy)
                        : ek_series(integrand, c_.t, c_.p2, c_.q2, c_.policy);
    worst_tail_ = std::max(worst_tail_, r.tail_estimate);
    max_terms_ = std::max(max_terms_, r.terms_used);
    return memo_.emplace(std::move(key), r).first->second;
  }

  const TheoremCase& c_;
  const FunctionSpec& second_weight_;
  FunctionSpec fg_, fh_, gh_, fgh_;
  std::map<std::pair<int, std::string>, SeriesResult> memo_;
  double worst_tail_ = 0.0;
  std::int64_t max_terms_ = 0;
};

void validate_case(const TheoremCase& c) {
  const bool two_weights = uses_second_weight(c.theorem);
  if (two_weights != c.v.has_value()) {
    throw InvalidParameter(std::string(to_string(c.theorem)) +
                           (two_weights ? " requires a second weight v" : " takes no second weight v"));
  }
  const bool needs_bounds = c.theorem == TheoremId::T3 || c.theorem == TheoremId::T4;
  const bool needs_lipschitz = c.theorem == TheoremId::T5 || c.theorem == TheoremId::T6;
  if (needs_bounds != c.bounds.has_value()) {
    throw InvalidParameter(std::string(to_string(c.theorem)) +
                           (needs_bounds ? " requires a bounds certificate" : " takes no bounds certificate"));
  }
  if (needs_lipschitz != c.lipschitz.has_value()) {
    throw InvalidParameter(std::string(to_string(c.theorem)) +
                           (needs_lipschitz ? " requires a Lipschitz certificate"
                                            : " takes no Lipschitz certificate"));
  }
  if (c.expect == Expectation::reversed && c.theorem != TheoremId::T1 &&
      c.theorem != TheoremId::T2) {
    throw InvalidParameter("reversed expectation applies to T1/T2 only");
  }
  if (!(c.t > 0.0) || !std::isfinite(c.t)) throw InvalidParameter("t must be positive");
  c.policy.validate();
  require_nonnegative(c.u, c.t, "u");
  if (c.v) require_nonnegative(*c.v, c.t, "v");
}

void check_chebyshev_hypotheses(const TheoremCase& c) {
  const std::vector<double> grid = uniform_grid(c.t, 65);
  if (c.expect == Expectation::direct) {
    const std::pair<const FunctionSpec*, const FunctionSpec*> pairs[] = {
        {&c.f, &c.g}, {&c.f, &c.h}, {&c.g, &c.h}};
    for (auto [a, b] : pairs) {
      if (check_synchronous(*a, *b, grid).classification != SyncClass::synchronous) {
        throw HypothesisViolated("f, g, h are not pairwise synchronous on [0, t]");
      }
    }
    return;
  }
  if (check_synchronous(c.f, c.g, grid).classification != SyncClass::asynchronous) {
    throw HypothesisViolated("reversed case needs f, g asynchronous on [0, t]");
  }
  require_nonnegative(c.h, c.t, "h");
}

void check_bounds(const TheoremCase& c) {
  const BoundsTriple& b = *c.bounds;
  if (!(b.psi <= b.Psi && b.phi <= b.Phi && b.omega <= b.Omega)) {
    throw HypothesisViolated("bounds certificate has a lower bound above its upper bound");
  }
  std::vector<double> samples = uniform_grid(c.t, 257);
  for (const FunctionSpec* s : {&c.f, &c.g, &c.h}) {
    if (s->kind() == FunctionSpec::Kind::piecewise_linear) {
      for (const Knot& k : s->knots()) {
        if (k.x < c.t) samples.push_back(k.x);
      }
    }
  }
  auto within = [](double v, double lo, double hi) {
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return v >= lo - slack && v <= hi + slack;
  };
  for (double x : samples) {
    if (!within(c.f.eval(x), b.psi, b.Psi) || !within(c.g.eval(x), b.phi, b.Phi) ||
        !within(c.h.eval(x), b.omega, b.Omega)) {
      throw HypothesisViolated("a sampled value escapes its certified bounds");
    }
  }
}

void check_lipschitz(const TheoremCase& c) {
  const LipschitzTriple& L = *c.lipschitz;
  if (!(L.L1 >= 0.0 && L.L2 >= 0.0 && L.L3 >= 0.0)) {
    throw HypothesisViolated("Lipschitz constants must be nonnegative");
  }
  const std::vector<double> grid = uniform_grid(c.t, 129);
  const std::pair<const FunctionSpec*, double> items[] = {{&c.f, L.L1}, {&c.g, L.L2}, {&c.h, L.L3}};
  for (auto [s, constant] : items) {
    std::vector<double> values;
    for (double x : grid) values.push_back(s->eval(x));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        if (std::abs(values[i] - values[j]) > constant * (grid[j] - grid[i]) + 1e-12) {
          throw HypothesisViolated("Lipschitz certificate fails on the sample grid");
        }
      }
    }
  }
}

void finish(InequalityReport& r, const Accumulator& lhs, const Accumulator& rhs,
            double oriented, const CaseEvaluator& ev) {
  r.margin = oriented;
  r.worst_tail = ev.worst_tail();
  r.operator_evals = ev.evals();
  r.scale = lhs.abs_sum + rhs.abs_sum;
  const double rounding =
      static_cast<double>(ev.max_terms() + 16) * kEps * r.scale;
  r.tol_effective = kTailSafetyFactor * (lhs.error + rhs.error) + rounding;
  if (std::abs(oriented) <= r.tol_effective) {
    r.verdict = Verdict::inconclusive;
  } else {
    r.verdict = oriented > 0.0 ? Verdict::holds : Verdict::violated;
  }
}

// Eight products of the T1/T2 displays: LHS first, then RHS.
InequalityReport chebyshev(const TheoremCase& c) {
  CaseEvaluator ev(c);
  Accumulator lhs;
  lhs.add(1, ev.B(Mono::fgh), ev.A(Mono::one));
  lhs.add(1, ev.B(Mono::fg), ev.A(Mono::h));
  lhs.add(1, ev.B(Mono::h), ev.A(Mono::fg));
  lhs.add(1, ev.B(Mono::one), ev.A(Mono::fgh));
  Accumulator rhs;
  rhs.add(1, ev.B(Mono::gh), ev.A(Mono::f));
  rhs.add(1, ev.B(Mono::fh), ev.A(Mono::g));
  rhs.add(1, ev.B(Mono::f), ev.A(Mono::gh));
  rhs.add(1, ev.B(Mono::g), ev.A(Mono::fh));

  InequalityReport r{c};
  r.lhs = lhs.value;
  r.rhs = rhs.value;
  const double raw = r.lhs - r.rhs;
  finish(r, lhs, rhs, c.expect == Expectation::direct ? raw : -raw, ev);
  return r;
}

// T3/T4: |alternating combination| <= A{1} B{1} (Psi-psi)(Phi-phi)(Omega-omega).
InequalityReport bounded(const TheoremCase& c) {
  CaseEvaluator ev(c);
  Accumulator combo;
  combo.add(1, ev.A(Mono::fgh), ev.B(Mono::one));
  combo.add(1, ev.A(Mono::h), ev.B(Mono::fg));
  combo.add(1, ev.A(Mono::g), ev.B(Mono::fh));
  combo.add(1, ev.A(Mono::f), ev.B(Mono::gh));
  combo.add(-1, ev.A(Mono::gh), ev.B(Mono::f));
  combo.add(-1, ev.A(Mono::fh), ev.B(Mono::g));
  combo.add(-1, ev.A(Mono::fg), ev.B(Mono::h));
  combo.add(-1, ev.A(Mono::one), ev.B(Mono::fgh));

  const BoundsTriple& b = *c.bounds;
  const double spread = (b.Psi - b.psi) * (b.Phi - b.phi) * (b.Omega - b.omega);
  Accumulator rhs;
  rhs.add(spread, ev.A(Mono::one), ev.B(Mono::one));

  InequalityReport r{c};
  r.lhs = std::abs(combo.value);
  r.rhs = rhs.value;
  finish(r, combo, rhs, r.rhs - r.lhs, ev);
  return r;
}

// T5/T6: |T1-style combination| <= L1 L2 L3 [moment bracket].
InequalityReport lipschitz(const TheoremCase& c) {
  CaseEvaluator ev(c);
  Accumulator combo;
  combo.add(1, ev.B(Mono::fgh), ev.A(Mono::one));
  combo.add(1, ev.B(Mono::fg), ev.A(Mono::h));
  combo.add(1, ev.B(Mono::h), ev.A(Mono::fg));
  combo.add(1, ev.B(Mono::one), ev.A(Mono::fgh));
  combo.add(-1, ev.B(Mono::gh), ev.A(Mono::f));
  combo.add(-1, ev.B(Mono::fh), ev.A(Mono::g));
  combo.add(-1, ev.B(Mono::f), ev.A(Mono::gh));
  combo.add(-1, ev.B(Mono::g), ev.A(Mono::fh));

  Accumulator bracket;
  bracket.add(1, ev.moment(q1_side, 3), ev.moment(q2_side, 0));
  bracket.add(3, ev.moment(q1_side, 1), ev.moment(q2_side, 2));
  bracket.add(-3, ev.moment(q1_side, 2), ev.moment(q2_side, 1));
  bracket.add(-1, ev.moment(q1_side, 0), ev.moment(q2_side, 3));

  const LipschitzTriple& L = *c.lipschitz;
  const double lip = L.L1 * L.L2 * L.L3;
  Accumulator rhs;
  rhs.value = lip * bracket.value;
  rhs.abs_sum = lip * bracket.abs_sum;
  rhs.error = lip * bracket.error;

  InequalityReport r{c};
  r.lhs = std::abs(combo.value);
  r.rhs = rhs.value;
  r.bracket = bracket.value;
  finish(r, combo, rhs, r.rhs - r.lhs, ev);
  const double bracket_tol = kTailSafetyFactor * bracket.error +
                             static_cast<double>(ev.max_terms() + 16) * kEps * bracket.abs_sum;
  r.bracket_nonnegative = bracket.value >= -bracket_tol;

  if (c.theorem == TheoremId::T6) {
    const double gh_term = std::abs(ev.B(Mono::gh).value * ev.A(Mono::f).value);
    const double others[] = {
        ev.B(Mono::fgh).value * ev.A(Mono::one).value, ev.B(Mono::fg).value * ev.A(Mono::h).value,
        ev.B(Mono::h).value * ev.A(Mono::fg).value,   ev.B(Mono::one).value * ev.A(Mono::fgh).value,
        ev.B(Mono::fh).value * ev.A(Mono::g).value,   ev.B(Mono::f).value * ev.A(Mono::gh).value,
        ev.B(Mono::g).value * ev.A(Mono::fh).value};
    const bool dominates = std::all_of(std::begin(others), std::end(others),
                                       [&](double p) { return gh_term >= std::abs(p); });
    if (dominates) r.note = "term B{g h} A{f} dominates the LHS";
  }
  return r;
}

InequalityReport guarded(const TheoremCase& c, InequalityReport (*body)(const TheoremCase&)) {
  try {
    return body(c);
  } catch (const NotConverged& e) {
    InequalityReport r{c};
    r.lhs = r.rhs = r.margin = std::numeric_limits<double>::quiet_NaN();
    r.worst_tail = std::numeric_limits<double>::infinity();
    r.verdict = Verdict::inconclusive;
    r.note = e.what();
    return r;
  }
}

InequalityReport run(const TheoremCase& c, TheoremId expected) {
  if (c.theorem != expected) {
    throw InvalidParameter("case is tagged " + std::string(to_string(c.theorem)) +
                           ", evaluator is " + std::string(to_string(expected)));
  }
  validate_case(c);
  switch (c.theorem) {
    case TheoremId::T1:
    case TheoremId::T2:
      check_chebyshev_hypotheses(c);
      return guarded(c, chebyshev);
    case TheoremId::T3:
    case TheoremId::T4:
      check_bounds(c);
      return guarded(c, bounded);
    case TheoremId::T5:
    case TheoremId::T6:
      check_lipschitz(c);
      return guarded(c, lipschitz);
  }
  throw InvalidParameter("unknown theorem");
}

}  // namespace

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2: return "T2";
    case TheoremId::T3: return "T3";
    case TheoremId::T4: return "T4";
    case TheoremId::T5: return "T5";
    case TheoremId::T6: return "T6";
  }
  return "T1";
}

TheoremId parse_theorem_id(std::string_view text) {
  for (int i = 1; i <= 6; ++i) {
    const auto id = static_cast<TheoremId>(i);
    if (text == to_string(id)) return id;
  }
  throw ParseError("unknown theorem id '" + std::string(text) + "' (expected T1..T6)");
}

bool uses_second_weight(TheoremId id) {
  return id == TheoremId::T2 || id == TheoremId::T4 || id == TheoremId::T6;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

InequalityReport theorem1(const TheoremCase& c) { return run(c, TheoremId::T1); }
InequalityReport theorem2(const TheoremCase& c) { return run(c, TheoremId::T2); }
InequalityReport theorem3(const TheoremCase& c) { return run(c, TheoremId::T3); }
InequalityReport theorem4(const TheoremCase& c) { return run(c, TheoremId::T4); }
InequalityReport theorem5(const TheoremCase& c) { return run(c, TheoremId::T5); }
InequalityReport theorem6(const TheoremCase& c) { return run(c, TheoremId::T6); }

InequalityReport evaluate(const TheoremCase& c) { return run(c, c.theorem); }

double proof_kernel_A(const FunctionSpec& f, const FunctionSpec& g,
                      const FunctionSpec& h, double tau, double rho) {
  const double ft = f.eval(tau), fr = f.eval(rho);
  const double gt = g.eval(tau), gr = g.eval(rho);
  const double ht = h.eval(tau), hr = h.eval(rho);
  // Each positive term is paired with the negative term that equals it at
  // tau = rho, so the kernel vanishes exactly there.
  return (ft * gt * ht - ft * gr * ht) + (fr * gr * ht - fr * gr * hr) +
         (ft * gr * hr - ft * gt * hr) + (fr * gt * hr - fr * gt * ht);
}

}  // namespace qfrac
