#ifndef BNPR_SAMP_LIK_HPP
#define BNPR_SAMP_LIK_HPP

#include "bnpr/genealogy.hpp"
#include "bnpr/grid.hpp"
#include "bnpr/prior.hpp"

namespace bnpr {

// Inhomogeneous-Poisson sampling-time log-likelihood with intensity
// lambda(t) = beta0 * N(t)^beta1, bucketed per grid cell and up to the
// gamma-free base-measure constant:
//   n*log(beta0) + beta1*sum_j c_j*gamma_j - beta0*sum_j w_j*exp(beta1*gamma_j).
double samp_loglik(const IntervalData& data, const Vector& gamma,
                   const SamplingParams& par);
double samp_loglik(const IntervalData& data, const LogPopTrajectory& traj,
                   const SamplingParams& par);

// Adds the gradient and (diagonal) Hessian in gamma to the outputs.
void samp_add_grad_hess(const IntervalData& data, const Vector& gamma,
                        const SamplingParams& par, Vector& grad, Vector& hess_diag);

void samp_grad_hess(const IntervalData& data, const LogPopTrajectory& traj,
                    const SamplingParams& par, Vector& grad, Vector& hess_diag);

}  // namespace bnpr

#endif  // BNPR_SAMP_LIK_HPP
