#include "bnpr/coal_lik.hpp"

namespace bnpr {

namespace {

void check(const IntervalData& data, const Vector& gamma) {
  if (gamma.size() != data.grid.cells) {
    throw InvalidInput("coal_lik: gamma length does not match the grid");
  }
  if (!gamma.allFinite()) throw InvalidInput("coal_lik: non-finite gamma");
}

}  // namespace

double coal_loglik(const IntervalData& data, const Vector& gamma) {
  check(data, gamma);
  return -data.coal_counts.dot(gamma) -
         (data.coal_pressure.array() * (-gamma.array()).exp()).sum();
}

double coal_loglik(const IntervalData& data, const LogPopTrajectory& traj) {
  if (!(traj.grid == data.grid)) throw InvalidInput("coal_lik: grid mismatch");
  return coal_loglik(data, traj.gamma);
}

void coal_add_grad_hess(const IntervalData& data, const Vector& gamma,
                        Vector& grad, Vector& hess_diag) {
  check(data, gamma);
  Array pressure = data.coal_pressure.array() * (-gamma.array()).exp();
  grad.array() += -data.coal_counts.array() + pressure;
  hess_diag.array() -= pressure;
}

void coal_grad_hess(const IntervalData& data, const LogPopTrajectory& traj,
                    Vector& grad, Vector& hess_diag) {
  if (!(traj.grid == data.grid)) throw InvalidInput("coal_lik: grid mismatch");
  grad = Vector::Zero(traj.gamma.size());
  hess_diag = Vector::Zero(traj.gamma.size());
  coal_add_grad_hess(data, traj.gamma, grad, hess_diag);
}

}  // namespace bnpr
