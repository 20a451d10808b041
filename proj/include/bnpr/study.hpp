#ifndef BNPR_STUDY_HPP
#define BNPR_STUDY_HPP

#include <cstdint>
#include <string>

#include "bnpr/metrics.hpp"
#include "bnpr/simulator.hpp"

namespace bnpr {

// Deterministic per-replicate seed derivation (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// How a replicate's sampling times are generated. Uniform draws exactly n
// times; the power schedules draw an inhomogeneous Poisson process with
// intensity proportional to N(t)^beta1, expected count n.
struct Schedule {
  std::string name;
  bool uniform = false;
  double beta1 = 1.0;
};

// Accepts "uniform", "proportional", "hyper2", "hyper3", or "power:<beta1>".
Schedule parse_schedule(const std::string& name);

struct StudyConfig {
  int replicates = 50;
  int n = 200;
  double window_lo = 0.0;
  double window_hi = 48.0;
  double seasonal_a = 2.0;
  double seasonal_o = 0.0;
  Index grid_cells = 100;
  int eval_points = 300;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = hardware concurrency
};

// Seasonal truth discretized finely over a horizon long enough to cover any
// plausible root time.
LogPopTrajectory study_truth(const StudyConfig& cfg);

// Both models fitted to the same simulated replicates of one schedule.
struct ScheduleStudy {
  Schedule schedule;
  StudyResult bnpr;
  StudyResult bnpr_ps;
};
ScheduleStudy run_schedule_study(const StudyConfig& cfg, const Schedule& schedule,
                                 const LogPopTrajectory& truth,
                                 std::uint64_t stream_base = 0);

// Negative control: sampling intensity independent of the population
// trajectory (one realization), replicate genealogies under the seasonal
// truth, both models fitted.
struct NegativeControlStudy {
  IntensityFn intensity;
  StudyResult bnpr;
  StudyResult bnpr_ps;
};
NegativeControlStudy run_negative_control(const StudyConfig& cfg,
                                          NegativeControlKind kind,
                                          std::uint64_t realization,
                                          const LogPopTrajectory& truth);

// Simple index-sharded parallel loop; rethrows the first worker exception.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace bnpr

#endif  // BNPR_STUDY_HPP
