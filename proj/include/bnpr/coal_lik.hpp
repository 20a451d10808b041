#ifndef BNPR_COAL_LIK_HPP
#define BNPR_COAL_LIK_HPP

#include "bnpr/genealogy.hpp"
#include "bnpr/grid.hpp"

namespace bnpr {

// Discretized coalescent log-likelihood in gamma, up to the gamma-free
// combinatorial constant: sum_j [ -d_j*gamma_j - E_j*exp(-gamma_j) ].
double coal_loglik(const IntervalData& data, const Vector& gamma);
double coal_loglik(const IntervalData& data, const LogPopTrajectory& traj);

// Adds the gradient and (diagonal) Hessian of coal_loglik to the outputs.
void coal_add_grad_hess(const IntervalData& data, const Vector& gamma,
                        Vector& grad, Vector& hess_diag);

// Convenience: gradient and Hessian diagonal alone.
void coal_grad_hess(const IntervalData& data, const LogPopTrajectory& traj,
                    Vector& grad, Vector& hess_diag);

}  // namespace bnpr

#endif  // BNPR_COAL_LIK_HPP
