#include "qfrac/ekoperator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qfrac {

namespace {

double sup_abs(const FunctionSpec& f, double t) {
  const Interval iv = f.enclose(0.0, t);
  return std::max(std::abs(iv.lo), std::abs(iv.hi));
}

void require_positive_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidParameter("operator evaluation point t must be positive and finite");
  }
}

// Upper bound for the ratio of consecutive series weights beyond index k:
// q^{eta+1} (1 - q^{mu+j}) / (1 - q^{j+1}) <= q^{eta+1} / (1 - q^{k+1}) for j >= k.
double weight_ratio_bound(double q_eta1, double mu, double q_k1) {
  return mu >= 1.0 ? q_eta1 : q_eta1 / (1.0 - q_k1);
}

[[noreturn]] void not_converged(const char* what, double sum, std::int64_t terms) {
  throw NotConverged(what, {sum, terms, std::numeric_limits<double>::infinity(), false});
}

SeriesResult series_impl(const FunctionSpec& f, double t, const OperatorParams& p,
                         DeformationParam q, const TruncationPolicy& policy,
                         std::vector<double>* terms) {
  policy.validate();
  require_positive_t(t);
  const double lq = std::log(q.value());
  const double prefactor = p.beta() * -std::expm1(lq / p.beta()) *
                           std::pow(1.0 - q, p.mu() - 1.0);
  const double q_eta1 = std::exp((p.eta() + 1.0) * lq);
  const double step = std::exp(lq / p.beta());  // q^{1/beta}
  const double sup = sup_abs(f, t);

  double coeff = 1.0;                 // (q^mu;q)_k / (q;q)_k q^{k(eta+1)}
  double q_mu_k = std::exp(p.mu() * lq);  // q^{mu+k}
  double q_k1 = q.value();            // q^{k+1}
  double node = t;
  double sum = 0.0;
  std::int64_t small_run = 0;

  for (std::int64_t k = 0; k < policy.max_terms; ++k) {
    const double term = prefactor * coeff * f.eval(node);
    sum += term;
    if (terms) terms->push_back(term);

    const double majorant = prefactor * coeff * sup;
    const double ratio = weight_ratio_bound(q_eta1, p.mu(), q_k1);
    const bool negligible =
        majorant < policy.rel_tol * std::abs(sum) + policy.abs_tol && ratio < 1.0;
    small_run = negligible ? small_run + 1 : 0;
    if (small_run >= policy.consecutive_small) {
      return {sum, k + 1, majorant * ratio / (1.0 - ratio), true};
    }

    coeff *= (1.0 - q_mu_k) / (1.0 - q_k1) * q_eta1;
    q_mu_k *= q;
    q_k1 *= q;
    node *= step;
  }
  not_converged("Erdelyi-Kober series did not converge", sum, policy.max_terms);
}

// Jackson sum in tau with base `step` for the integral representation:
//   scale * (1 - step) t sum_j step^j kernel(tau_j) tau_j^{power} f(tau_j),
// where kernel(tau) = (t^beta - tau^beta q)_{mu-1}.
SeriesResult integral_impl(const FunctionSpec& f, double t, double eta, double mu,
                           double beta, DeformationParam q,
                           const TruncationPolicy& policy) {
  policy.validate();
  require_positive_t(t);
  const SeriesResult gamma = q_gamma(mu, q, policy);
  const double scale = beta * std::pow(t, -beta * (eta + mu)) / gamma.value;
  const double step = std::pow(q.value(), 1.0 / beta);
  const double width = (1.0 - step) * t;
  const double tau_power = beta * (eta + 1.0) - 1.0;
  const double t_beta = std::pow(t, beta);
  const double q_eta1 = std::pow(q.value(), eta + 1.0);
  const double sup = sup_abs(f, t);

  double sum = 0.0;
  double kernel_tail = 0.0;
  double step_j = 1.0;
  double q_j1 = q.value();
  std::int64_t small_run = 0;

  for (std::int64_t j = 0; j < policy.max_terms; ++j) {
    const double tau = t * step_j;
    const SeriesResult kernel =
        q_power_alpha(t_beta, std::pow(tau, beta) * q.value(), q, mu - 1.0, policy);
    const double weight = scale * width * step_j * kernel.value * std::pow(tau, tau_power);
    const double fv = f.eval(tau);
    sum += weight * fv;
    kernel_tail += std::abs(weight / kernel.value * fv) * kernel.tail_estimate;

    const double majorant = std::abs(weight) * sup;
    const double ratio = weight_ratio_bound(q_eta1, mu, q_j1);
    const bool negligible =
        majorant < policy.rel_tol * std::abs(sum) + policy.abs_tol && ratio < 1.0;
    small_run = negligible ? small_run + 1 : 0;
    if (small_run >= policy.consecutive_small) {
      const double series_tail = majorant * ratio / (1.0 - ratio);
      const double gamma_tail = std::abs(sum) * gamma.tail_estimate / gamma.value;
      return {sum, j + 1, series_tail + kernel_tail + gamma_tail, true};
    }
    step_j *= step;
    q_j1 *= q;
  }
  not_converged("Erdelyi-Kober integral form did not converge", sum, policy.max_terms);
}

}  // namespace

OperatorParams::OperatorParams(double eta, double mu, double beta)
    : eta_(eta), mu_(mu), beta_(beta) {
  if (!std::isfinite(eta) || !(eta > -1.0)) {
    std::ostringstream os;
    os << "eta must be > -1 (eta=" << eta
       << "): the operator series has term ratio q^(eta+1) and diverges otherwise";
    throw InvalidParameter(os.str());
  }
  if (!std::isfinite(mu) || !(mu > 0.0)) throw InvalidParameter("mu must be > 0");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw InvalidParameter("beta must be > 0");
}

SeriesResult ek_series(const FunctionSpec& f, double t, const OperatorParams& p,
                       DeformationParam q, const TruncationPolicy& policy) {
  return series_impl(f, t, p, q, policy, nullptr);
}

OperatorTrace ek_series_trace(const FunctionSpec& f, double t, const OperatorParams& p,
                              DeformationParam q, const TruncationPolicy& policy) {
  OperatorTrace out;
  out.result = series_impl(f, t, p, q, policy, &out.terms);
  return out;
}

SeriesResult ek_integral(const FunctionSpec& f, double t, const OperatorParams& p,
                         DeformationParam q, const TruncationPolicy& policy) {
  return integral_impl(f, t, p.eta(), p.mu(), p.beta(), q, policy);
}

SeriesResult kober(const FunctionSpec& f, double t, double eta, double mu,
                   DeformationParam q, const TruncationPolicy& policy) {
  const OperatorParams checked(eta, mu, 1.0);
  policy.validate();
  require_positive_t(t);
  const SeriesResult gamma = q_gamma(checked.mu(), q, policy);
  const double scale = std::pow(t, -eta - mu) / gamma.value;
  const double width = (1.0 - q) * t;
  const double q_eta1 = std::pow(q.value(), eta + 1.0);
  const double sup = sup_abs(f, t);

  double sum = 0.0;
  double kernel_tail = 0.0;
  double q_j = 1.0;
  std::int64_t small_run = 0;
  for (std::int64_t j = 0; j < policy.max_terms; ++j) {
    const double tau = t * q_j;
    const SeriesResult kernel = q_power_alpha(t, tau * q.value(), q, mu - 1.0, policy);
    const double weight = scale * width * q_j * kernel.value * std::pow(tau, eta);
    const double fv = f.eval(tau);
    sum += weight * fv;
    kernel_tail += std::abs(weight / kernel.value * fv) * kernel.tail_estimate;

    const double majorant = std::abs(weight) * sup;
    const double ratio = weight_ratio_bound(q_eta1, mu, q_j * q.value());
    const bool negligible =
        majorant < policy.rel_tol * std::abs(sum) + policy.abs_tol && ratio < 1.0;
    small_run = negligible ? small_run + 1 : 0;
    if (small_run >= policy.consecutive_small) {
      const double gamma_tail = std::abs(sum) * gamma.tail_estimate / gamma.value;
      return {sum, j + 1, majorant * ratio / (1.0 - ratio) + kernel_tail + gamma_tail, true};
    }
    q_j *= q;
  }
  not_converged("q-Kober integral did not converge", sum, policy.max_terms);
}

FunctionSpec weighted_integrand(const FunctionSpec& f, int weight_power,
                                const FunctionSpec& u) {
  if (weight_power < 0) throw InvalidParameter("weight power must be >= 0");
  const FunctionSpec base = FunctionSpec::product(u, f);
  if (weight_power == 0) return base;
  return FunctionSpec::product(FunctionSpec::power(weight_power), base);
}

SeriesResult ek_weighted(const FunctionSpec& f, int weight_power, const FunctionSpec& u,
                         double t, const OperatorParams& p, DeformationParam q,
                         const TruncationPolicy& policy) {
  return ek_series(weighted_integrand(f, weight_power, u), t, p, q, policy);
}

}  // namespace qfrac
