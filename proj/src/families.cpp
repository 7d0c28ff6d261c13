#include <algorithm>
#include <cmath>
#include <random>

#include "qfrac/functions.hpp"

namespace qfrac {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Integer-only draws: std::mt19937_64 is fully specified by the standard,
// the distributions in <random> are not.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  /// A multiple of 1/16 in [lo, hi].
  double dyadic(double lo, double hi) {
    const int a = static_cast<int>(std::ceil(lo * 16.0));
    const int b = static_cast<int>(std::floor(hi * 16.0));
    return integer(a, b) / 16.0;
  }

  template <typename T, std::size_t N>
  T pick(const T (&options)[N]) {
    return options[integer(0, static_cast<int>(N) - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

constexpr double kAnyExponents[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
constexpr double kLipschitzExponents[] = {1.0, 1.5, 2.0, 3.0};

// T^p for the half-integer exponents above using only IEEE-exact operations.
double half_integer_power(double T, double p) {
  const int twice = static_cast<int>(p * 2.0);
  double out = (twice % 2 == 1) ? std::sqrt(T) : 1.0;
  for (int i = 0; i < twice / 2; ++i) out *= T;
  return out;
}

double exponent(Draw& d, bool lipschitz) {
  return lipschitz ? d.pick(kLipschitzExponents) : d.pick(kAnyExponents);
}

// Abscissae 0 = x_0 < ... < x_n = T.
std::vector<double> knot_positions(Draw& d, double T) {
  const int interior = d.integer(1, 4);
  std::vector<int> slots;
  while (static_cast<int>(slots.size()) < interior) {
    const int s = d.integer(1, 15);
    if (std::find(slots.begin(), slots.end(), s) == slots.end()) slots.push_back(s);
  }
  std::sort(slots.begin(), slots.end());
  std::vector<double> xs{0.0};
  for (int s : slots) xs.push_back(T * s / 16.0);
  xs.push_back(T);
  return xs;
}

FunctionSpec increasing_pwl(Draw& d, double T) {
  std::vector<Knot> knots;
  double y = d.dyadic(0.0, 1.0);
  for (double x : knot_positions(d, T)) {
    knots.push_back({x, y});
    y += d.dyadic(1.0 / 16.0, 1.0);
  }
  return FunctionSpec::piecewise_linear(std::move(knots));
}

FunctionSpec decreasing_pwl(Draw& d, double T) {
  FunctionSpec up = increasing_pwl(d, T);
  std::vector<Knot> knots(up.knots().begin(), up.knots().end());
  const std::size_t n = knots.size();
  std::vector<Knot> mirrored;
  for (std::size_t i = 0; i < n; ++i) mirrored.push_back({knots[i].x, knots[n - 1 - i].y});
  return FunctionSpec::piecewise_linear(std::move(mirrored));
}

FunctionSpec arbitrary_pwl(Draw& d, double T, double lo, double hi) {
  std::vector<Knot> knots;
  for (double x : knot_positions(d, T)) knots.push_back({x, d.dyadic(lo, hi)});
  return FunctionSpec::piecewise_linear(std::move(knots));
}

/// Nonnegative, non-constant and increasing on [0, T].
FunctionSpec increasing_nonneg(Draw& d, double T, bool lipschitz) {
  switch (d.integer(0, 5)) {
    case 0: return FunctionSpec::power(exponent(d, lipschitz));
    case 1: return FunctionSpec::affine(d.dyadic(1.0 / 16.0, 2.0), d.dyadic(0.0, 1.0));
    case 2: return increasing_pwl(d, T);
    case 3:
      return FunctionSpec::scale(d.dyadic(0.25, 2.0), FunctionSpec::power(exponent(d, lipschitz)));
    case 4:
      return FunctionSpec::sum(FunctionSpec::power(exponent(d, lipschitz)),
                               FunctionSpec::affine(d.dyadic(1.0 / 16.0, 1.0), d.dyadic(0.0, 1.0)));
    default:
      return FunctionSpec::product(
          FunctionSpec::power(exponent(d, lipschitz)),
          FunctionSpec::affine(d.dyadic(1.0 / 16.0, 1.0), d.dyadic(1.0 / 16.0, 1.0)));
  }
}

/// Nonnegative, non-constant and decreasing on [0, T].
FunctionSpec decreasing_nonneg(Draw& d, double T, bool lipschitz) {
  switch (d.integer(0, 2)) {
    case 0: {
      const double a = d.dyadic(1.0 / 16.0, 2.0);
      return FunctionSpec::affine(-a, a * T + d.dyadic(1.0 / 16.0, 1.0));
    }
    case 1: return decreasing_pwl(d, T);
    default: {
      const double p = exponent(d, lipschitz);
      const double s = d.dyadic(0.25, 1.0);
      return FunctionSpec::sum(
          FunctionSpec::constant(s * half_integer_power(T, p) + d.dyadic(1.0 / 16.0, 1.0)),
          FunctionSpec::scale(-s, FunctionSpec::power(p)));
    }
  }
}

FunctionSpec nonneg_any(Draw& d, double T) {
  switch (d.integer(0, 5)) {
    case 0: return FunctionSpec::constant(d.dyadic(0.25, 2.0));
    case 1: return FunctionSpec::power(d.pick({0.0, 0.5, 1.0, 2.0}));
    case 2: return FunctionSpec::affine(d.dyadic(0.0, 1.0), d.dyadic(1.0 / 16.0, 1.0));
    case 3: return arbitrary_pwl(d, T, 0.0, 2.0);
    case 4: return decreasing_nonneg(d, T, false);
    default: return increasing_nonneg(d, T, false);
  }
}

FunctionSpec bounded_any(Draw& d, double T) {
  switch (d.integer(0, 3)) {
    case 0:
    case 1: return increasing_nonneg(d, T, false);
    case 2: return decreasing_nonneg(d, T, false);
    default: return arbitrary_pwl(d, T, -1.0, 2.0);
  }
}

}  // namespace

std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::synchronous_triple: return "synchronous_triple";
    case FamilyKind::asynchronous_pair_plus_nonneg: return "asynchronous_pair_plus_nonneg";
    case FamilyKind::bounded_triple: return "bounded_triple";
    case FamilyKind::lipschitz_triple: return "lipschitz_triple";
  }
  return "synchronous_triple";
}

FamilyKind parse_family_kind(std::string_view name) {
  for (FamilyKind k : {FamilyKind::synchronous_triple, FamilyKind::asynchronous_pair_plus_nonneg,
                       FamilyKind::bounded_triple, FamilyKind::lipschitz_triple}) {
    if (to_string(k) == name) return k;
  }
  throw ParseError("unknown family kind '" + std::string(name) + "'");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

Family generate_family(FamilyKind kind, std::uint64_t seed, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameter("family domain T must be finite and > 0");
  Draw d(seed);
  switch (kind) {
    case FamilyKind::synchronous_triple: {
      FunctionSpec f = increasing_nonneg(d, T, false).with_domain(T);
      FunctionSpec g = increasing_nonneg(d, T, false).with_domain(T);
      FunctionSpec h = increasing_nonneg(d, T, false).with_domain(T);
      return {f, g, h, std::nullopt, std::nullopt};
    }
    case FamilyKind::asynchronous_pair_plus_nonneg: {
      FunctionSpec f = increasing_nonneg(d, T, false).with_domain(T);
      FunctionSpec g = decreasing_nonneg(d, T, false).with_domain(T);
      if (d.integer(0, 1) == 1) std::swap(f, g);
      FunctionSpec h = nonneg_any(d, T).with_domain(T);
      return {f, g, h, std::nullopt, std::nullopt};
    }
    case FamilyKind::bounded_triple: {
      FunctionSpec f = bounded_any(d, T).with_domain(T);
      FunctionSpec g = bounded_any(d, T).with_domain(T);
      FunctionSpec h = bounded_any(d, T).with_domain(T);
      const Bounds bf = extract_bounds(f, T);
      const Bounds bg = extract_bounds(g, T);
      const Bounds bh = extract_bounds(h, T);
      return {f, g, h, BoundsTriple{bf.lower, bf.upper, bg.lower, bg.upper, bh.lower, bh.upper},
              std::nullopt};
    }
    case FamilyKind::lipschitz_triple: {
      FunctionSpec f = increasing_nonneg(d, T, true).with_domain(T);
      FunctionSpec g = increasing_nonneg(d, T, true).with_domain(T);
      FunctionSpec h = increasing_nonneg(d, T, true).with_domain(T);
      return {f, g, h, std::nullopt,
              LipschitzTriple{extract_lipschitz(f, T), extract_lipschitz(g, T),
                              extract_lipschitz(h, T)}};
    }
  }
  throw InvalidParameter("unknown family kind");
}

FunctionSpec generate_weight(std::uint64_t seed, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameter("weight domain T must be finite and > 0");
  Draw d(mix_seed(seed, 0x77656967ULL));
  return nonneg_any(d, T).with_domain(T);
}

}  // namespace qfrac
