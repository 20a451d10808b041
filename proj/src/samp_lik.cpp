#include "bnpr/samp_lik.hpp"

#include <cmath>

namespace bnpr {

namespace {

void check(const IntervalData& data, const Vector& gamma, const SamplingParams& par) {
  if (gamma.size() != data.grid.cells) {
    throw InvalidInput("samp_lik: gamma length does not match the grid");
  }
  if (!(par.beta0 > 0.0) || !std::isfinite(par.beta0) || !std::isfinite(par.beta1)) {
    throw InvalidInput("samp_lik: beta0 must be positive and both betas finite");
  }
}

}  // namespace

double samp_loglik(const IntervalData& data, const Vector& gamma,
                   const SamplingParams& par) {
  check(data, gamma, par);
  double n = static_cast<double>(data.n_tips);
  return n * std::log(par.beta0) + par.beta1 * data.samp_counts.dot(gamma) -
         par.beta0 *
             (data.samp_exposure.array() * (par.beta1 * gamma.array()).exp()).sum();
}

double samp_loglik(const IntervalData& data, const LogPopTrajectory& traj,
                   const SamplingParams& par) {
  if (!(traj.grid == data.grid)) throw InvalidInput("samp_lik: grid mismatch");
  return samp_loglik(data, traj.gamma, par);
}

void samp_add_grad_hess(const IntervalData& data, const Vector& gamma,
                        const SamplingParams& par, Vector& grad, Vector& hess_diag) {
  check(data, gamma, par);
  Array mass =
      par.beta0 * data.samp_exposure.array() * (par.beta1 * gamma.array()).exp();
  grad.array() += par.beta1 * (data.samp_counts.array() - mass);
  hess_diag.array() -= par.beta1 * par.beta1 * mass;
}

void samp_grad_hess(const IntervalData& data, const LogPopTrajectory& traj,
                    const SamplingParams& par, Vector& grad, Vector& hess_diag) {
  if (!(traj.grid == data.grid)) throw InvalidInput("samp_lik: grid mismatch");
  grad = Vector::Zero(traj.gamma.size());
  hess_diag = Vector::Zero(traj.gamma.size());
  samp_add_grad_hess(data, traj.gamma, par, grad, hess_diag);
}

}  // namespace bnpr
