#pragma once

// q-derivative and Jackson q-integrals over the geometric node set {q^j b}.

#include <utility>
#include <vector>

#include "qfrac/functions.hpp"
#include "qfrac/qcore.hpp"

namespace qfrac {

/// Nodes b, b q, b q^2, ... with the sampled function values.
struct QGridSample {
  double base_point;
  DeformationParam base;
  std::vector<std::pair<double, double>> values;  // (node, f(node))
};

/// Samples f at b q^j for j = 0..count-1.
QGridSample sample_q_grid(const FunctionSpec& f, double b, DeformationParam q,
                          int count);

/// D_q f(t) = (f(qt) - f(t)) / ((q - 1) t).
template <typename F>
double q_derivative(F&& f, double t, DeformationParam q) {
  if (t == 0.0) throw InvalidParameter("q-derivative needs t != 0");
  return (f(q * t) - f(t)) / ((q - 1.0) * t);
}

double q_derivative(const FunctionSpec& f, double t, DeformationParam q);

/// (1-q) b sum_j q^j f(q^j b).
///
/// Terms are judged negligible against the majorant (1-q) b q^j sup|f|, with
/// sup|f| taken from the interval enclosure on [0, b]; the tail estimate is
/// the last majorant times q/(1-q).
SeriesResult jackson_integral(const FunctionSpec& f, double b, DeformationParam q,
                              const TruncationPolicy& policy = {});

/// int_a^b = int_0^b - int_0^a. For a > b the result is the negated integral
/// over [b, a].
SeriesResult jackson_integral_ab(const FunctionSpec& f, double a, double b,
                                 DeformationParam q,
                                 const TruncationPolicy& policy = {});

/// sum_j f(q^j b) (g(q^j b) - g(q^{j+1} b)).
SeriesResult jackson_stieltjes(const FunctionSpec& f, const FunctionSpec& g,
                               double b, DeformationParam q,
                               const TruncationPolicy& policy = {});

}  // namespace qfrac
