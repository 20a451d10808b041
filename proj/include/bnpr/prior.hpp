#ifndef BNPR_PRIOR_HPP
#define BNPR_PRIOR_HPP

#include <optional>

#include "bnpr/common.hpp"

namespace bnpr {

// Parameters of the inhomogeneous Poisson sampling intensity
// lambda(t) = beta0 * N(t)^beta1.
struct SamplingParams {
  double beta0 = 1.0;
  double beta1 = 0.0;
};

// Hyperparameters of one model: RW1 precision tau, plus the sampling
// parameters when the sampling likelihood is in play.
struct Hyperparams {
  double tau = 1.0;
  std::optional<SamplingParams> samp;
};

// Sum of squared first differences of gamma. The intrinsic RW1 log prior is
// ((B-1)/2)*log(tau) - (tau/2)*rw1_quadform(gamma) up to a constant.
double rw1_quadform(const Vector& gamma);

// tau * Q * v for the RW1 structure matrix Q (tridiagonal stencil
// [-1, 2, -1], boundary rows [1, -1]); v^T Q v == rw1_quadform(v).
Vector rw1_precision_apply(double tau, const Vector& v);

// Gamma-dependent part of the RW1 log prior at precision tau.
double rw1_logprior(double tau, const Vector& gamma);

// Gamma(0.01, 0.01) log density at tau, plus Normal(0, 1000) log densities
// at beta0 and beta1 when present. Natural scale; no Jacobian terms.
double log_hyperprior(const Hyperparams& hp);

}  // namespace bnpr

#endif  // BNPR_PRIOR_HPP
