#include "bnpr/prior.hpp"

#include <cmath>
#include <numbers>

namespace bnpr {

namespace {

constexpr double kTauShape = 0.01;
constexpr double kTauRate = 0.01;
constexpr double kBetaVariance = 1000.0;

double gamma_logpdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double normal_logpdf(double x, double mean, double variance) {
  double z = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) -
         z * z / (2.0 * variance);
}

}  // namespace

double rw1_quadform(const Vector& gamma) {
  const Index n = gamma.size();
  if (n < 2) throw InvalidInput("rw1_quadform: need at least 2 cells");
  return (gamma.tail(n - 1) - gamma.head(n - 1)).squaredNorm();
}

Vector rw1_precision_apply(double tau, const Vector& v) {
  const Index n = v.size();
  if (n < 2) throw InvalidInput("rw1_precision_apply: need at least 2 cells");
  if (!(tau > 0.0)) throw InvalidInput("rw1_precision_apply: tau must be positive");
  Vector out(n);
  out[0] = v[0] - v[1];
  for (Index i = 1; i < n - 1; ++i) {
    out[i] = -v[i - 1] + 2.0 * v[i] - v[i + 1];
  }
  out[n - 1] = v[n - 1] - v[n - 2];
  return tau * out;
}

double rw1_logprior(double tau, const Vector& gamma) {
  double b = static_cast<double>(gamma.size());
  return 0.5 * (b - 1.0) * std::log(tau) - 0.5 * tau * rw1_quadform(gamma);
}

double log_hyperprior(const Hyperparams& hp) {
  if (!(hp.tau > 0.0)) throw InvalidInput("log_hyperprior: tau must be positive");
  double lp = gamma_logpdf(hp.tau, kTauShape, kTauRate);
  if (hp.samp) {
    if (!(hp.samp->beta0 > 0.0)) {
      throw InvalidInput("log_hyperprior: beta0 must be positive");
    }
    lp += normal_logpdf(hp.samp->beta0, 0.0, kBetaVariance);
    lp += normal_logpdf(hp.samp->beta1, 0.0, kBetaVariance);
  }
  return lp;
}

}  // namespace bnpr
