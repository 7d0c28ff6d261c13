#include "qfrac/jackson.hpp"

#include <cmath>
#include <limits>

namespace qfrac {

namespace {

double sup_abs(const FunctionSpec& f, double b) {
  const Interval iv = f.enclose(0.0, b);
  return std::max(std::abs(iv.lo), std::abs(iv.hi));
}

}  // namespace

QGridSample sample_q_grid(const FunctionSpec& f, double b, DeformationParam q,
                          int count) {
  if (!(b > 0.0)) throw InvalidParameter("q-grid base point must be positive");
  QGridSample out{b, q, {}};
  out.values.reserve(static_cast<std::size_t>(std::max(count, 0)));
  double node = b;
  for (int j = 0; j < count; ++j) {
    out.values.emplace_back(node, f.eval(node));
    node *= q;
  }
  return out;
}

double q_derivative(const FunctionSpec& f, double t, DeformationParam q) {
  if (!(t > 0.0)) throw DomainError("q-derivative of a function on [0, inf) needs t > 0");
  return q_derivative([&f](double x) { return f.eval(x); }, t, q);
}

SeriesResult jackson_integral(const FunctionSpec& f, double b, DeformationParam q,
                              const TruncationPolicy& policy) {
  policy.validate();
  if (!(b > 0.0)) throw InvalidParameter("Jackson integral needs b > 0");
  const double sup = sup_abs(f, b);
  const double width = (1.0 - q) * b;
  double sum = 0.0;
  double weight = 1.0;  // q^j
  double node = b;
  std::int64_t small_run = 0;
  for (std::int64_t j = 0; j < policy.max_terms; ++j) {
    sum += width * weight * f.eval(node);
    const double majorant = width * weight * sup;
    small_run = (majorant < policy.rel_tol * std::abs(sum) + policy.abs_tol) ? small_run + 1 : 0;
    if (small_run >= policy.consecutive_small) {
      return {sum, j + 1, majorant * q / (1.0 - q), true};
    }
    weight *= q;
    node = b * weight;
  }
  throw NotConverged("Jackson integral did not converge",
                     {sum, policy.max_terms, std::numeric_limits<double>::infinity(), false});
}

SeriesResult jackson_integral_ab(const FunctionSpec& f, double a, double b,
                                 DeformationParam q, const TruncationPolicy& policy) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidParameter("Jackson integral limits must be positive");
  if (a == b) return {0.0, 0, 0.0, true};
  const SeriesResult upper = jackson_integral(f, b, q, policy);
  const SeriesResult lower = jackson_integral(f, a, q, policy);
  return {upper.value - lower.value, upper.terms_used + lower.terms_used,
          upper.tail_estimate + lower.tail_estimate, true};
}

SeriesResult jackson_stieltjes(const FunctionSpec& f, const FunctionSpec& g,
                               double b, DeformationParam q,
                               const TruncationPolicy& policy) {
  policy.validate();
  if (!(b > 0.0)) throw InvalidParameter("Jackson-Stieltjes integral needs b > 0");
  double sum = 0.0;
  double node = b;
  double g_here = g.eval(node);
  double last = 0.0;
  std::int64_t small_run = 0;
  for (std::int64_t j = 0; j < policy.max_terms; ++j) {
    const double next = node * q;
    const double g_next = g.eval(next);
    last = f.eval(node) * (g_here - g_next);
    sum += last;
    small_run = (std::abs(last) < policy.rel_tol * std::abs(sum) + policy.abs_tol) ? small_run + 1 : 0;
    if (small_run >= policy.consecutive_small) {
      return {sum, j + 1, std::abs(last) * q / (1.0 - q), true};
    }
    node = next;
    g_here = g_next;
  }
  throw NotConverged("Jackson-Stieltjes integral did not converge",
                     {sum, policy.max_terms, std::numeric_limits<double>::infinity(), false});
}

}  // namespace qfrac
