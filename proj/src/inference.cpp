#include "bnpr/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace bnpr {

namespace {

Vector default_gamma_init(const IntervalData& data) {
  double pooled = data.coal_pressure.sum() / std::max(1.0, data.coal_counts.sum());
  double g = std::log(std::max(pooled, 1e-12));
  return Vector::Constant(data.grid.cells, g);
}

double logsumexp(const std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Classic Nelder-Mead on the negated objective, d = 1..3. Convergence is a
// simplex diameter below tol in every coordinate; every objective call counts
// against the evaluation budget.
std::vector<double> nelder_mead_max(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> init, double step, double tol, int max_evals) {
  const std::size_t d = init.size();
  int evals = 0;
  auto f = [&](const std::vector<double>& z) {
    if (++evals > max_evals) {
      throw NumericError("hyperparameter search: no convergence in " +
                         std::to_string(max_evals) + " evaluations");
    }
    return objective(z);
  };

  std::vector<std::vector<double>> v(d + 1, init);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i < d; ++i) v[i + 1][i] += step;
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(v[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(d + 1);
    for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
    std::vector<std::vector<double>> v2(d + 1);
    std::vector<double> f2(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      v2[i] = v[idx[i]];
      f2[i] = fv[idx[i]];
    }
    v = std::move(v2);
    fv = std::move(f2);
  };

  while (true) {
    order();
    double diam = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        diam = std::max(diam, std::abs(v[i][j] - v[0][j]));
      }
    }
    if (diam < tol) return v[0];

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) centroid[j] += v[i][j];
    }
    for (std::size_t j = 0; j < d; ++j) centroid[j] /= static_cast<double>(d);

    auto blend = [&](double coef) {
      std::vector<double> z(d);
      for (std::size_t j = 0; j < d; ++j) {
        z[j] = centroid[j] + coef * (centroid[j] - v[d][j]);
      }
      return z;
    };

    std::vector<double> xr = blend(1.0);
    double fr = f(xr);
    if (fr > fv[0]) {
      std::vector<double> xe = blend(2.0);
      double fe = f(xe);
      if (fe > fr) {
        v[d] = std::move(xe);
        fv[d] = fe;
      } else {
        v[d] = std::move(xr);
        fv[d] = fr;
      }
    } else if (fr > fv[d - 1]) {
      v[d] = std::move(xr);
      fv[d] = fr;
    } else {
      bool outside = fr > fv[d];
      std::vector<double> xc = blend(outside ? 0.5 : -0.5);
      double fc = f(xc);
      if ((outside && fc >= fr) || (!outside && fc > fv[d])) {
        v[d] = std::move(xc);
        fv[d] = fc;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            v[i][j] = v[0][j] + 0.5 * (v[i][j] - v[0][j]);
          }
          fv[i] = f(v[i]);
        }
      }
    }
  }
}

std::vector<std::vector<int>> grid_offsets(std::size_t dims, int extent) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(dims, -extent);
  while (true) {
    out.push_back(idx);
    std::size_t k = 0;
    while (k < dims && idx[k] == extent) {
      idx[k] = -extent;
      ++k;
    }
    if (k == dims) break;
    idx[k] += 1;
  }
  return out;
}

}  // namespace

std::vector<WeightedZ> weighted_theta_grid(
    const std::function<double(const std::vector<double>&)>& log_density,
    const std::vector<double>& z_star, const ExploreOptions& opts) {
  std::vector<WeightedZ> pts;
  for (const auto& off : grid_offsets(z_star.size(), opts.grid_extent)) {
    std::vector<double> z = z_star;
    for (std::size_t j = 0; j < z.size(); ++j) {
      z[j] += opts.grid_step * static_cast<double>(off[j]);
    }
    double lw = log_density(z);
    if (std::isfinite(lw)) pts.push_back({std::move(z), lw});
  }
  if (pts.empty()) throw NumericError("hyperparameter grid: no finite points");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::max(best, p.log_weight);
  std::erase_if(pts, [&](const WeightedZ& p) { return p.log_weight < best - opts.log_prune; });
  std::vector<double> lws;
  lws.reserve(pts.size());
  for (const auto& p : pts) lws.push_back(p.log_weight);
  double lse = logsumexp(lws);
  for (auto& p : pts) p.log_weight -= lse;
  return pts;
}

std::vector<ThetaPoint> explore_hyperparams(const ModelSpec& model,
                                            const ExploreOptions& opts) {
  const IntervalData& data = model.data;
  const bool with_sampling = model.kind == ModelKind::BNPR_PS;
  if (with_sampling && !data.has_sampling()) {
    throw InvalidInput("BNPR_PS requires sampling exposure on the grid");
  }
  const bool free_betas = with_sampling && !opts.fix_beta.has_value();
  const std::size_t dims = free_betas ? 3 : 1;

  struct Eval {
    double lm = -1e100;
    bool ok = false;
    Hyperparams hp;
    ModeResult mode;
  };

  Vector warm = default_gamma_init(data);
  auto evaluate = [&](const std::vector<double>& z) {
    Eval ev;
    if (z[0] < opts.log_tau_min || z[0] > opts.log_tau_max) return ev;
    ev.hp.tau = std::exp(z[0]);
    double jacobian = z[0];  // d tau / d log tau
    if (with_sampling) {
      if (free_betas) {
        ev.hp.samp = SamplingParams{std::exp(z[1]), z[2]};
        jacobian += z[1];
      } else {
        ev.hp.samp = *opts.fix_beta;
      }
    }
    try {
      if (with_sampling) {
        CoalSampLik lik{&data, *ev.hp.samp};
        ev.lm = log_marginal_theta(lik, ev.hp, warm, &ev.mode) + jacobian;
      } else {
        CoalescentLik lik{&data};
        ev.lm = log_marginal_theta(lik, ev.hp, warm, &ev.mode) + jacobian;
      }
    } catch (const NumericError&) {
      return ev;
    }
    if (!std::isfinite(ev.lm)) {
      ev.lm = -1e100;
      return ev;
    }
    warm = ev.mode.gamma;
    ev.ok = true;
    return ev;
  };

  std::vector<double> z0(dims, 0.0);
  if (free_betas) {
    double pooled_ne =
        data.coal_pressure.sum() / std::max(1.0, data.coal_counts.sum());
    double window = data.samp_exposure.sum();
    z0[2] = 1.0;
    z0[1] = std::log(static_cast<double>(data.n_tips) /
                     (window * std::max(pooled_ne, 1e-12)));
  }

  auto objective = [&](const std::vector<double>& z) { return evaluate(z).lm; };
  std::vector<double> z_star =
      nelder_mead_max(objective, z0, 1.0, opts.z_tol, opts.max_evals);

  std::vector<Eval> evals;
  std::vector<double> lms;
  for (const auto& off : grid_offsets(dims, opts.grid_extent)) {
    std::vector<double> z = z_star;
    for (std::size_t j = 0; j < dims; ++j) {
      z[j] += opts.grid_step * static_cast<double>(off[j]);
    }
    Eval ev = evaluate(z);
    if (ev.ok) {
      lms.push_back(ev.lm);
      evals.push_back(std::move(ev));
    }
  }
  if (evals.empty()) throw NumericError("hyperparameter grid: no usable points");

  double best = *std::max_element(lms.begin(), lms.end());
  std::vector<const Eval*> kept;
  std::vector<double> kept_lms;
  for (const auto& ev : evals) {
    if (ev.lm >= best - opts.log_prune) {
      kept.push_back(&ev);
      kept_lms.push_back(ev.lm);
    }
  }
  double lse = logsumexp(kept_lms);

  std::vector<ThetaPoint> out;
  out.reserve(kept.size());
  for (const Eval* ev : kept) {
    ThetaPoint tp;
    tp.hp = ev->hp;
    tp.log_weight = ev->lm - lse;
    tp.mode = ev->mode.gamma;
    tp.cond_prec_diag = -ev->mode.lik_hess_diag;
    tp.marginal_sd = ev->mode.prec.inverse_diagonal().cwiseSqrt();
    tp.newton_iterations = ev->mode.iterations;
    tp.newton_grad_norm = ev->mode.grad_norm;
    out.push_back(std::move(tp));
  }
  return out;
}

double mixture_cdf(const std::vector<MixtureComponent>& mix, double x) {
  double c = 0.0;
  for (const auto& m : mix) c += m.weight * normal_cdf((x - m.mean) / m.sd);
  return c;
}

double mixture_quantile(const std::vector<MixtureComponent>& mix, double q) {
  if (mix.empty()) throw InvalidInput("mixture_quantile: empty mixture");
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("mixture_quantile: q in (0,1)");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& m : mix) {
    lo = std::min(lo, m.mean - 10.0 * m.sd);
    hi = std::max(hi, m.mean + 10.0 * m.sd);
  }
  for (int guard = 0; guard < 64 && mixture_cdf(mix, lo) > q; ++guard) {
    lo -= (hi - lo);
  }
  for (int guard = 0; guard < 64 && mixture_cdf(mix, hi) < q; ++guard) {
    hi += (hi - lo);
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double c = mixture_cdf(mix, mid);
    if (std::abs(c - q) <= 1e-9) break;
    (c < q ? lo : hi) = mid;
  }
  return mid;
}

double weighted_quantile(std::vector<std::pair<double, double>> value_weight,
                         double q) {
  if (value_weight.empty()) throw InvalidInput("weighted_quantile: no atoms");
  std::sort(value_weight.begin(), value_weight.end());
  // merge equal values
  std::vector<std::pair<double, double>> atoms;
  for (const auto& [v, w] : value_weight) {
    if (!atoms.empty() && atoms.back().first == v) {
      atoms.back().second += w;
    } else {
      atoms.emplace_back(v, w);
    }
  }
  double total = 0.0;
  for (const auto& [v, w] : atoms) total += w;
  double c_prev = 0.0, v_prev = atoms.front().first;
  double cum = 0.0;
  for (const auto& [v, w] : atoms) {
    cum += w / total;
    if (cum >= q) {
      if (cum == c_prev) return v;
      double frac = (q - c_prev) / (cum - c_prev);
      return frac <= 0.0 ? v_prev : v_prev + frac * (v - v_prev);
    }
    c_prev = cum;
    v_prev = v;
  }
  return atoms.back().first;
}

PosteriorSummary marginal_summaries(const ModelSpec& model,
                                    const std::vector<ThetaPoint>& thetas) {
  if (thetas.empty()) throw InvalidInput("marginal_summaries: empty theta set");
  const Grid& grid = model.grid();
  const Index nb = grid.cells;

  PosteriorSummary post;
  post.grid = grid;
  post.ne_median.resize(nb);
  post.ne_q025.resize(nb);
  post.ne_q975.resize(nb);

  std::vector<MixtureComponent> mix(thetas.size());
  for (Index j = 0; j < nb; ++j) {
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      mix[k] = {std::exp(thetas[k].log_weight), thetas[k].mode[j],
                thetas[k].marginal_sd[j]};
    }
    post.ne_median[j] = std::exp(mixture_quantile(mix, 0.5));
    post.ne_q025[j] = std::exp(mixture_quantile(mix, 0.025));
    post.ne_q975[j] = std::exp(mixture_quantile(mix, 0.975));
  }

  auto hyper_triple = [&](auto&& get) {
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(thetas.size());
    for (const auto& tp : thetas) {
      atoms.emplace_back(get(tp), std::exp(tp.log_weight));
    }
    QuantileTriple t;
    t.median = weighted_quantile(atoms, 0.5);
    t.lower = weighted_quantile(atoms, 0.025);
    t.upper = weighted_quantile(atoms, 0.975);
    return t;
  };

  post.tau = hyper_triple([](const ThetaPoint& tp) { return tp.hp.tau; });
  if (thetas.front().hp.samp) {
    post.beta0 = hyper_triple([](const ThetaPoint& tp) { return tp.hp.samp->beta0; });
    post.beta1 = hyper_triple([](const ThetaPoint& tp) { return tp.hp.samp->beta1; });
  }
  for (const auto& tp : thetas) {
    post.max_newton_iterations = std::max(post.max_newton_iterations, tp.newton_iterations);
    post.max_newton_grad_norm = std::max(post.max_newton_grad_norm, tp.newton_grad_norm);
  }
  post.theta_points = thetas;
  return post;
}

PosteriorSummary infer_posterior(const ModelSpec& model, const ExploreOptions& opts) {
  return marginal_summaries(model, explore_hyperparams(model, opts));
}

void write_posterior_csv(std::ostream& os, const PosteriorSummary& post) {
  os << "time,median,q025,q975\n";
  char buf[160];
  for (Index j = 0; j < post.grid.cells; ++j) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", post.grid.midpoint(j),
                  post.ne_median[j], post.ne_q025[j], post.ne_q975[j]);
    os << buf;
  }
}

void write_posterior_json(std::ostream& os, const PosteriorSummary& post) {
  nlohmann::json j;
  auto triple = [](const QuantileTriple& t) {
    return nlohmann::json{{"median", t.median}, {"q025", t.lower}, {"q975", t.upper}};
  };
  j["tau"] = triple(post.tau);
  if (post.beta0) j["beta0"] = triple(*post.beta0);
  if (post.beta1) j["beta1"] = triple(*post.beta1);
  j["grid"] = {{"t_min", post.grid.t_min},
               {"t_max", post.grid.t_max},
               {"cells", post.grid.cells}};
  j["newton"] = {{"max_iterations", post.max_newton_iterations},
                 {"max_grad_norm", post.max_newton_grad_norm}};
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& tp : post.theta_points) {
    nlohmann::json p{{"tau", tp.hp.tau}, {"log_weight", tp.log_weight}};
    if (tp.hp.samp) {
      p["beta0"] = tp.hp.samp->beta0;
      p["beta1"] = tp.hp.samp->beta1;
    }
    pts.push_back(std::move(p));
  }
  j["theta_grid"] = std::move(pts);
  os << j.dump(2) << '\n';
}

}  // namespace bnpr
