#pragma once

// The generalized Erdelyi-Kober fractional q-integral
//
//   I^{eta,mu,beta}_q f(t)
//     = beta t^{-beta(eta+mu)} / Gamma_q(mu)
//         * int_0^t (t^beta - tau^beta q)_{mu-1} tau^{beta(eta+1)-1} f(tau) d_q tau
//     = beta (1 - q^{1/beta}) (1 - q)^{mu-1}
//         * sum_k (q^mu;q)_k / (q;q)_k q^{k(eta+1)} f(t q^{k/beta})
//
// The series is the reference evaluation. The integral form samples tau at
// t (q^{1/beta})^j and is kept as an independent check of the series.

#include <vector>

#include "qfrac/functions.hpp"
#include "qfrac/qcore.hpp"

namespace qfrac {

class OperatorParams {
 public:
  /// Requires eta > -1 (the series ratio q^{eta+1} must be < 1), mu > 0 and
  /// beta > 0.
  OperatorParams(double eta, double mu, double beta);

  double eta() const noexcept { return eta_; }
  double mu() const noexcept { return mu_; }
  double beta() const noexcept { return beta_; }

  friend bool operator==(const OperatorParams&, const OperatorParams&) = default;

 private:
  double eta_;
  double mu_;
  double beta_;
};

struct OperatorTrace {
  SeriesResult result;
  /// Every retained series term, in summation order.
  std::vector<double> terms;
};

SeriesResult ek_series(const FunctionSpec& f, double t, const OperatorParams& p,
                       DeformationParam q, const TruncationPolicy& policy = {});

/// ek_series that also returns each retained term.
OperatorTrace ek_series_trace(const FunctionSpec& f, double t, const OperatorParams& p,
                              DeformationParam q, const TruncationPolicy& policy = {});

/// Integral representation; the kernel is evaluated with q_power_alpha and
/// Gamma_q(mu) with q_gamma at every call.
SeriesResult ek_integral(const FunctionSpec& f, double t, const OperatorParams& p,
                         DeformationParam q, const TruncationPolicy& policy = {});

/// The q-Kober operator t^{-eta-mu} / Gamma_q(mu) int_0^t (t - tau q)_{mu-1}
/// tau^eta f(tau) d_q tau, i.e. the beta = 1 case.
SeriesResult kober(const FunctionSpec& f, double t, double eta, double mu,
                   DeformationParam q, const TruncationPolicy& policy = {});

/// ek_series applied to s -> s^weight_power u(s) f(s).
SeriesResult ek_weighted(const FunctionSpec& f, int weight_power, const FunctionSpec& u,
                         double t, const OperatorParams& p, DeformationParam q,
                         const TruncationPolicy& policy = {});

/// The integrand used by ek_weighted; exposed so callers can key caches on it.
FunctionSpec weighted_integrand(const FunctionSpec& f, int weight_power,
                                const FunctionSpec& u);

}  // namespace qfrac
