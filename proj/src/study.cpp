#include "bnpr/study.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace bnpr {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Schedule parse_schedule(const std::string& name) {
  if (name == "uniform") return {"uniform", true, 0.0};
  if (name == "proportional") return {"proportional", false, 1.0};
  if (name == "hyper2") return {"hyper2", false, 2.0};
  if (name == "hyper3") return {"hyper3", false, 3.0};
  if (name.rfind("power:", 0) == 0) {
    try {
      double b1 = std::stod(name.substr(6));
      return {name, false, b1};
    } catch (const std::exception&) {
    }
  }
  throw InvalidInput("unknown sampling schedule '" + name + "'");
}

LogPopTrajectory study_truth(const StudyConfig& cfg) {
  // 25x the sampling window leaves the post-sampling coalescent tail with
  // negligible mass outside the grid.
  double horizon = 25.0 * (cfg.window_hi - cfg.window_lo) + cfg.window_hi;
  Index cells = static_cast<Index>(std::ceil(horizon / 0.1));
  Grid g = build_grid(0.0, horizon, cells);
  return discretize(
      [&](double t) { return seasonal_ne(cfg.seasonal_a, cfg.seasonal_o, t); }, g);
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct ReplicateFit {
  PosteriorSummary bnpr;
  PosteriorSummary bnpr_ps;
};

ReplicateFit fit_replicate(const StudyConfig& cfg, const LogPopTrajectory& truth,
                           const std::vector<SamplingEvent>& samples,
                           std::uint64_t coal_seed) {
  Genealogy gen = simulate_coalescent(samples, truth, coal_seed, cfg.window_hi);
  Grid grid = build_grid(0.0, std::max(gen.root_time(), gen.s0), cfg.grid_cells);
  IntervalData data = decompose_intervals(gen, grid);

  ReplicateFit fit;
  fit.bnpr = infer_posterior({ModelKind::BNPR, data});
  fit.bnpr_ps = infer_posterior({ModelKind::BNPR_PS, data});
  return fit;
}

}  // namespace

ScheduleStudy run_schedule_study(const StudyConfig& cfg, const Schedule& schedule,
                                 const LogPopTrajectory& truth,
                                 std::uint64_t stream_base) {
  ScheduleStudy out;
  out.schedule = schedule;
  out.bnpr.eval_times = make_eval_times(cfg.window_lo, cfg.window_hi, cfg.eval_points);
  out.bnpr_ps.eval_times = out.bnpr.eval_times;
  out.bnpr.replicates.resize(cfg.replicates);
  out.bnpr_ps.replicates.resize(cfg.replicates);

  IntensityFn intensity =
      schedule.uniform
          ? constant_intensity(cfg.window_lo, cfg.window_hi,
                               cfg.n / (cfg.window_hi - cfg.window_lo))
          : power_of_ne_intensity(truth, cfg.window_lo, cfg.window_hi, 1.0,
                                  schedule.beta1);
  CountMode mode = schedule.uniform ? CountMode::FixedCount : CountMode::PoissonProcess;

  parallel_for(cfg.replicates, cfg.jobs, [&](int i) {
    std::uint64_t samp_seed = derive_seed(cfg.seed, stream_base + 2 * i);
    std::uint64_t coal_seed = derive_seed(cfg.seed, stream_base + 2 * i + 1);
    auto samples = sample_times(intensity, cfg.n, samp_seed, mode);
    ReplicateFit fit = fit_replicate(cfg, truth, samples, coal_seed);
    out.bnpr.replicates[i] = {truth, std::move(fit.bnpr)};
    out.bnpr_ps.replicates[i] = {truth, std::move(fit.bnpr_ps)};
  });
  return out;
}

NegativeControlStudy run_negative_control(const StudyConfig& cfg,
                                          NegativeControlKind kind,
                                          std::uint64_t realization,
                                          const LogPopTrajectory& truth) {
  NegativeControlStudy out;
  out.intensity = negative_control_intensity(
      kind, derive_seed(cfg.seed, 0xc011ull + realization), cfg.window_lo,
      cfg.window_hi, cfg.n);
  out.bnpr.eval_times = make_eval_times(cfg.window_lo, cfg.window_hi, cfg.eval_points);
  out.bnpr_ps.eval_times = out.bnpr.eval_times;
  out.bnpr.replicates.resize(cfg.replicates);
  out.bnpr_ps.replicates.resize(cfg.replicates);

  std::uint64_t stream_base = (realization + 1) * 1000003ull;
  parallel_for(cfg.replicates, cfg.jobs, [&](int i) {
    std::uint64_t samp_seed = derive_seed(cfg.seed, stream_base + 2 * i);
    std::uint64_t coal_seed = derive_seed(cfg.seed, stream_base + 2 * i + 1);
    auto samples = sample_times(out.intensity, cfg.n, samp_seed);
    ReplicateFit fit = fit_replicate(cfg, truth, samples, coal_seed);
    out.bnpr.replicates[i] = {truth, std::move(fit.bnpr)};
    out.bnpr_ps.replicates[i] = {truth, std::move(fit.bnpr_ps)};
  });
  return out;
}

}  // namespace bnpr
