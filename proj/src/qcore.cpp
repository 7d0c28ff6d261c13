#include "qfrac/qcore.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qfrac {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool vanishes(double factor, double scale) {
  return std::abs(factor) <= 4.0 * kEps * std::max(1.0, std::abs(scale));
}

std::string describe(const char* what, double a, double q) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (a=" << a << ", q=" << q << ")";
  return os.str();
}

// prod_{k>=0} (1 - a q^k) / (1 - b q^k), accumulated as a sum of paired
// logarithms. Pairing keeps the ratio representable when each product
// underflows on its own.
SeriesResult ratio_product(double a, double b, double q,
                           const TruncationPolicy& policy) {
  policy.validate();
  const double gap = std::abs(b - a);
  double log_sum = 0.0;
  bool negative = false;
  bool numerator_zero = false;
  double qk = 1.0;
  std::int64_t small_run = 0;

  for (std::int64_t k = 0; k < policy.max_terms; ++k) {
    const double x = a * qk;
    const double y = b * qk;
    const double num = 1.0 - x;
    const double den = 1.0 - y;
    if (vanishes(den, y)) {
      throw DivisionByZero(describe("vanishing denominator factor in (b;q)_inf", b, q));
    }
    double term = 0.0;
    if (vanishes(num, x)) {
      numerator_zero = true;
    } else if (x < 1.0 && y < 1.0) {
      term = std::log1p(-x) - std::log1p(-y);
    } else {
      term = std::log(std::abs(num)) - std::log(std::abs(den));
      if ((num < 0.0) != (den < 0.0)) negative = !negative;
    }
    log_sum += term;
    qk *= q;

    const bool bound_valid = (std::abs(b) + gap) * qk < 0.5;
    if (std::abs(term) < policy.rel_tol && bound_valid) {
      ++small_run;
    } else {
      small_run = 0;
    }
    if (small_run >= policy.consecutive_small) {
      SeriesResult out;
      out.terms_used = k + 1;
      out.converged = true;
      if (numerator_zero) {
        out.value = 0.0;
        out.tail_estimate = 0.0;
        return out;
      }
      out.value = negative ? -std::exp(log_sum) : std::exp(log_sum);
      // |log(1-x) - log(1-y)| <= |y-x| / (1 - |y| - |y-x|), summed over the tail.
      const double delta =
          gap * qk / ((1.0 - q) * (1.0 - (std::abs(b) + gap) * qk));
      out.tail_estimate = std::abs(out.value) * std::expm1(delta);
      return out;
    }
  }
  SeriesResult partial;
  partial.value = numerator_zero ? 0.0 : (negative ? -std::exp(log_sum) : std::exp(log_sum));
  partial.terms_used = policy.max_terms;
  partial.tail_estimate = std::numeric_limits<double>::infinity();
  throw NotConverged(describe("q-product ratio did not converge", a, q), partial);
}

bool near_nonpositive_integer(double a) {
  const double r = std::round(a);
  return r <= 0.0 && std::abs(a - r) < 1e-12;
}

}  // namespace

DeformationParam::DeformationParam(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InvalidParameter("q must lie in (0,1)");
  }
}

void TruncationPolicy::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_terms <= 0 ||
      consecutive_small <= 0) {
    throw InvalidParameter("truncation policy fields must be strictly positive");
  }
  if (max_terms < consecutive_small) {
    throw InvalidParameter("truncation policy requires max_terms >= consecutive_small");
  }
}

double q_pochhammer_n(double a, DeformationParam q, int n) {
  if (n >= 0) {
    double prod = 1.0;
    double qk = 1.0;
    for (int k = 0; k < n; ++k) {
      prod *= 1.0 - a * qk;
      qk *= q;
    }
    return prod;
  }
  double prod = 1.0;
  for (int k = 1; k <= -n; ++k) {
    const double x = a * std::pow(q.value(), -k);
    const double factor = 1.0 - x;
    if (vanishes(factor, x)) {
      throw DivisionByZero(describe("negative-subscript factor vanishes", a, q));
    }
    prod *= factor;
  }
  return 1.0 / prod;
}

SeriesResult q_pochhammer_inf(double a, DeformationParam q,
                              const TruncationPolicy& policy) {
  policy.validate();
  if (!std::isfinite(a)) {
    throw InvalidParameter("(a;q)_inf requires finite a");
  }
  const bool log_space = a < 1.0;
  double log_sum = 0.0;
  double prod = 1.0;
  double qk = 1.0;
  std::int64_t small_run = 0;

  for (std::int64_t k = 0; k < policy.max_terms; ++k) {
    const double x = a * qk;
    if (log_space) {
      log_sum += std::log1p(-x);
    } else {
      prod *= 1.0 - x;
      if (vanishes(1.0 - x, x)) {
        return SeriesResult{0.0, k + 1, 0.0, true};
      }
    }
    qk *= q;

    const double next = std::abs(a) * qk;
    small_run = (next < policy.rel_tol) ? small_run + 1 : 0;
    if (small_run >= policy.consecutive_small) {
      SeriesResult out;
      out.value = log_space ? std::exp(log_sum) : prod;
      out.terms_used = k + 1;
      out.converged = true;
      const double delta = next / ((1.0 - q) * (1.0 - next));
      out.tail_estimate = std::abs(out.value) * std::expm1(delta);
      return out;
    }
  }
  SeriesResult partial{log_space ? std::exp(log_sum) : prod, policy.max_terms,
                       std::numeric_limits<double>::infinity(), false};
  throw NotConverged(describe("(a;q)_inf did not converge", a, q), partial);
}

SeriesResult q_pochhammer_alpha(double a, DeformationParam q, double alpha,
                                const TruncationPolicy& policy) {
  return ratio_product(a, a * std::pow(q.value(), alpha), q, policy);
}

SeriesResult q_gamma(double a, DeformationParam q,
                     const TruncationPolicy& policy) {
  if (near_nonpositive_integer(a)) {
    throw PoleError(describe("q-Gamma pole at nonpositive integer", a, q));
  }
  SeriesResult r = ratio_product(q, std::pow(q.value(), a), q, policy);
  const double scale = std::pow(1.0 - q, 1.0 - a);
  r.value *= scale;
  r.tail_estimate *= scale;
  return r;
}

double q_integer(double x, DeformationParam q) {
  const double lq = std::log(q.value());
  return std::expm1(x * lq) / std::expm1(lq);
}

double q_factorial(int n, DeformationParam q) {
  if (n < 0) throw InvalidParameter("q_factorial requires n >= 0");
  double prod = 1.0;
  for (int k = 1; k <= n; ++k) prod *= q_integer(k, q);
  return prod;
}

double q_power(double t, double a, DeformationParam q, int n) {
  if (n < 0) throw InvalidParameter("q_power requires n >= 0");
  double prod = 1.0;
  double qk = 1.0;
  for (int k = 0; k < n; ++k) {
    prod *= t - qk * a;
    qk *= q;
  }
  return prod;
}

SeriesResult q_power_alpha(double t, double a, DeformationParam q,
                           double alpha, const TruncationPolicy& policy) {
  if (!(t > 0.0)) throw InvalidParameter("q_power_alpha requires t > 0");
  SeriesResult r = q_pochhammer_alpha(a / t, q, alpha, policy);
  const double scale = std::pow(t, alpha);
  r.value *= scale;
  r.tail_estimate *= scale;
  return r;
}

}  // namespace qfrac
