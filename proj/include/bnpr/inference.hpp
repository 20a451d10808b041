#ifndef BNPR_INFERENCE_HPP
#define BNPR_INFERENCE_HPP

#include <cmath>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <vector>

#include "bnpr/coal_lik.hpp"
#include "bnpr/genealogy.hpp"
#include "bnpr/prior.hpp"
#include "bnpr/samp_lik.hpp"
#include "bnpr/tridiag.hpp"

namespace bnpr {

enum class ModelKind { BNPR, BNPR_PS };

// One inference problem: which likelihoods are in play, plus the per-cell
// sufficient statistics. BNPR_PS needs the sampling columns populated.
struct ModelSpec {
  ModelKind kind = ModelKind::BNPR;
  IntervalData data;

  const Grid& grid() const { return data.grid; }
};

// Latent-field likelihood adapters. Anything with loglik/add_grad_hess of
// this shape can drive the engine (tests use a Gaussian replacement).
struct CoalescentLik {
  const IntervalData* data;
  double loglik(const Vector& gamma) const { return coal_loglik(*data, gamma); }
  void add_grad_hess(const Vector& gamma, Vector& grad, Vector& hess_diag) const {
    coal_add_grad_hess(*data, gamma, grad, hess_diag);
  }
};

struct CoalSampLik {
  const IntervalData* data;
  SamplingParams par;
  double loglik(const Vector& gamma) const {
    return coal_loglik(*data, gamma) + samp_loglik(*data, gamma, par);
  }
  void add_grad_hess(const Vector& gamma, Vector& grad, Vector& hess_diag) const {
    coal_add_grad_hess(*data, gamma, grad, hess_diag);
    samp_add_grad_hess(*data, gamma, par, grad, hess_diag);
  }
};

// Outcome of the Newton mode search for one hyperparameter point.
struct ModeResult {
  Vector gamma;           // conditional mode gamma*(theta)
  int iterations = 0;     // accepted Newton steps
  double grad_norm = 0.0; // max-norm of the posterior gradient at exit
  double loglik = 0.0;    // likelihood value at the mode
  Vector lik_hess_diag;   // likelihood Hessian diagonal at the mode (<= 0)
  SymTridiagLDLT prec;    // factored tau*Q + D at the mode
};

inline constexpr double kNewtonStepTol = 1e-8;
inline constexpr double kNewtonGradTol = 1e-6;
inline constexpr int kNewtonMaxIters = 100;
inline constexpr int kNewtonMaxHalvings = 30;

// Newton-Raphson maximization of loglik(gamma) + RW1 log prior at fixed tau.
// The likelihood Hessian is diagonal, so every step is one O(B) symmetric
// tridiagonal solve. Steps that fail to increase the objective are halved.
template <class Lik>
ModeResult find_mode(const Lik& lik, double tau, const Vector& gamma_init) {
  const Index nb = gamma_init.size();
  if (nb < 2) throw InvalidInput("find_mode: need at least 2 cells");
  if (!(tau > 0.0)) throw InvalidInput("find_mode: tau must be positive");

  Vector q_diag = Vector::Constant(nb, 2.0);
  q_diag[0] = q_diag[nb - 1] = 1.0;
  const Vector p_off = Vector::Constant(nb - 1, -tau);

  auto objective = [&](const Vector& g) { return lik.loglik(g) + rw1_logprior(tau, g); };

  ModeResult res;
  res.gamma = gamma_init;
  double f = objective(res.gamma);
  if (!std::isfinite(f)) {
    throw NumericError("find_mode: objective not finite at the starting point");
  }

  Vector grad(nb), hess(nb);
  for (int pass = 0; pass <= kNewtonMaxIters; ++pass) {
    grad.setZero();
    hess.setZero();
    lik.add_grad_hess(res.gamma, grad, hess);
    grad -= rw1_precision_apply(tau, res.gamma);
    if (!grad.allFinite() || !hess.allFinite()) {
      throw NumericError("find_mode: non-finite derivatives");
    }

    res.prec.compute(tau * q_diag - hess, p_off);
    Vector delta = res.prec.solve(grad);

    res.grad_norm = grad.template lpNorm<Eigen::Infinity>();
    if (delta.template lpNorm<Eigen::Infinity>() < kNewtonStepTol) {
      res.lik_hess_diag = hess;
      res.loglik = lik.loglik(res.gamma);
      if (res.grad_norm >= kNewtonGradTol) {
        throw NumericError("find_mode: stalled with gradient max-norm " +
                           std::to_string(res.grad_norm));
      }
      return res;
    }
    if (pass == kNewtonMaxIters) break;

    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kNewtonMaxHalvings; ++h) {
      Vector cand = res.gamma + scale * delta;
      double fc = objective(cand);
      // tolerate roundoff-level non-increase near the optimum
      if (std::isfinite(fc) && fc >= f - 1e-10 * (1.0 + std::abs(f))) {
        res.gamma = std::move(cand);
        f = fc;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      throw NumericError("find_mode: step halving exhausted, gradient max-norm " +
                         std::to_string(res.grad_norm));
    }
    res.iterations += 1;
  }
  throw NumericError("find_mode: no convergence in " +
                     std::to_string(kNewtonMaxIters) +
                     " iterations, gradient max-norm " + std::to_string(res.grad_norm));
}

// Laplace approximation of the log hyperparameter marginal at theta:
// loglik(g*) + logprior(g*|tau) + loghyper(theta) + (B/2) log 2pi
// - (1/2) logdet(tau*Q + D), defined up to a theta-free constant.
template <class Lik>
double log_marginal_theta(const Lik& lik, const Hyperparams& hp,
                          const Vector& gamma_init, ModeResult* mode_out = nullptr) {
  ModeResult mode = find_mode(lik, hp.tau, gamma_init);
  const double b = static_cast<double>(mode.gamma.size());
  double lm = mode.loglik + rw1_logprior(hp.tau, mode.gamma) + log_hyperprior(hp) +
              0.5 * b * std::log(2.0 * std::numbers::pi) - 0.5 * mode.prec.log_det();
  if (mode_out != nullptr) *mode_out = std::move(mode);
  return lm;
}

// One retained hyperparameter point of the integration grid.
struct ThetaPoint {
  Hyperparams hp;
  double log_weight = 0.0;  // normalized over the retained set
  Vector mode;
  Vector cond_prec_diag;    // negated likelihood Hessian at the mode
  Vector marginal_sd;       // per-cell SD of the Gaussian approximation
  int newton_iterations = 0;
  double newton_grad_norm = 0.0;
};

struct ExploreOptions {
  double z_tol = 1e-4;        // direct-search tolerance in z
  int max_evals = 500;
  double grid_step = 0.75;    // z-units per axis
  int grid_extent = 3;        // +/- steps per axis
  double log_prune = 10.0;    // drop points this far below the max
  double log_tau_min = -12.0;
  double log_tau_max = 12.0;
  // Freeze the sampling parameters (BNPR_PS only): explore tau alone.
  std::optional<SamplingParams> fix_beta;
};

// Direct-search maximization plus a centered regular grid in
// z = (log tau) or (log tau, log beta0, beta1); weights are normalized
// exp(log marginal) over the retained points. The z-space density includes
// the log-scale Jacobians for tau and beta0.
std::vector<ThetaPoint> explore_hyperparams(const ModelSpec& model,
                                            const ExploreOptions& opts = {});

struct QuantileTriple {
  double median = 0.0;
  double lower = 0.0;   // 2.5%
  double upper = 0.0;   // 97.5%
};

struct PosteriorSummary {
  Grid grid;
  Vector ne_median, ne_q025, ne_q975;
  std::vector<ThetaPoint> theta_points;
  QuantileTriple tau;
  std::optional<QuantileTriple> beta0;
  std::optional<QuantileTriple> beta1;
  int max_newton_iterations = 0;
  double max_newton_grad_norm = 0.0;
};

// Per-cell posterior of gamma_j as the weighted Gaussian mixture over theta
// points; N_e quantiles are exp of the gamma quantiles. Hyperparameter
// marginals come from the weighted grid atoms.
PosteriorSummary marginal_summaries(const ModelSpec& model,
                                    const std::vector<ThetaPoint>& thetas);

// explore_hyperparams followed by marginal_summaries.
PosteriorSummary infer_posterior(const ModelSpec& model, const ExploreOptions& opts = {});

// --- numeric helpers shared with tests ---

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct MixtureComponent {
  double weight;
  double mean;
  double sd;
};

double mixture_cdf(const std::vector<MixtureComponent>& mix, double x);
// Bisection on the mixture CDF; the returned x satisfies |CDF(x) - q| <= 1e-9.
double mixture_quantile(const std::vector<MixtureComponent>& mix, double q);

// Piecewise-linear inverse of the weighted CDF over discrete atoms.
double weighted_quantile(std::vector<std::pair<double, double>> value_weight, double q);

// Grid/prune/normalize step of explore_hyperparams, exposed for testing:
// evaluates log_density on the centered grid around z_star and returns the
// retained (z, normalized log weight) pairs.
struct WeightedZ {
  std::vector<double> z;
  double log_weight;
};
std::vector<WeightedZ> weighted_theta_grid(
    const std::function<double(const std::vector<double>&)>& log_density,
    const std::vector<double>& z_star, const ExploreOptions& opts = {});

void write_posterior_csv(std::ostream& os, const PosteriorSummary& post);
void write_posterior_json(std::ostream& os, const PosteriorSummary& post);

}  // namespace bnpr

#endif  // BNPR_INFERENCE_HPP
