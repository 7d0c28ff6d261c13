#pragma once

// q-shifted factorials, q-Gamma, q-factorial and q-power.
//
// All infinite sums and products are truncated under a TruncationPolicy and
// return a SeriesResult carrying the truncation tail bound.

#include <cstdint>
#include <string>

#include "qfrac/errors.hpp"

namespace qfrac {

/// Deformation parameter q, strictly inside (0, 1).
class DeformationParam {
 public:
  explicit DeformationParam(double q);

  double value() const noexcept { return q_; }
  operator double() const noexcept { return q_; }

 private:
  double q_;
};

struct TruncationPolicy {
  double rel_tol = 1e-14;
  double abs_tol = 1e-300;
  std::int64_t max_terms = 100000;
  std::int64_t consecutive_small = 3;

  /// Throws InvalidParameter unless every field is strictly positive and
  /// max_terms >= consecutive_small.
  void validate() const;
};

struct SeriesResult {
  double value = 0.0;
  std::int64_t terms_used = 0;
  double tail_estimate = 0.0;
  bool converged = false;
};

/// Raised when a truncated series hits max_terms with non-negligible terms.
/// The partial result is kept for diagnostics.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, SeriesResult partial)
      : Error(what), partial_(partial) {}

  const SeriesResult& partial() const noexcept { return partial_; }

 private:
  SeriesResult partial_;
};

/// (a;q)_n for any integer n. Negative n uses the reciprocal product
/// 1 / prod_{k=1}^{|n|} (1 - a q^{-k}).
double q_pochhammer_n(double a, DeformationParam q, int n);

/// (a;q)_inf = prod_{k>=0} (1 - a q^k). Summed in log space when every
/// factor is positive.
SeriesResult q_pochhammer_inf(double a, DeformationParam q,
                              const TruncationPolicy& policy = {});

/// (a;q)_alpha = (a;q)_inf / (a q^alpha; q)_inf for real alpha.
///
/// The two products are paired factor by factor, so the ratio stays finite
/// when both products underflow (q close to 1).
SeriesResult q_pochhammer_alpha(double a, DeformationParam q, double alpha,
                                const TruncationPolicy& policy = {});

/// Gamma_q(a) = (q;q)_inf / (q^a;q)_inf * (1-q)^(1-a).
/// Throws PoleError at nonpositive integers (within 1e-12).
SeriesResult q_gamma(double a, DeformationParam q,
                     const TruncationPolicy& policy = {});

/// q-integer [x]_q = (1 - q^x) / (1 - q).
double q_integer(double x, DeformationParam q);

/// (n)_q! = [1]_q [2]_q ... [n]_q.
double q_factorial(int n, DeformationParam q);

/// (t - a)_q^n = prod_{k=0}^{n-1} (t - q^k a).
double q_power(double t, double a, DeformationParam q, int n);

/// t^alpha (a/t; q)_alpha for t > 0; the kernel (t^beta - tau^beta q)_{mu-1}
/// of the Erdelyi-Kober operator is q_power_alpha(t^beta, tau^beta q, q, mu-1).
SeriesResult q_power_alpha(double t, double a, DeformationParam q,
                           double alpha, const TruncationPolicy& policy = {});

}  // namespace qfrac
