#ifndef BNPR_METRICS_HPP
#define BNPR_METRICS_HPP

#include <vector>

#include "bnpr/grid.hpp"
#include "bnpr/inference.hpp"

namespace bnpr {

// One simulation replicate: the generating trajectory and the fitted summary.
struct ReplicateResult {
  LogPopTrajectory truth;
  PosteriorSummary summary;
};

// Replicate ensemble plus the shared evaluation grid t_0..t_k. Truth and
// estimates are step functions, so alignment is nearest-cell lookup.
struct StudyResult {
  std::vector<ReplicateResult> replicates;
  std::vector<double> eval_times;
};

std::vector<double> make_eval_times(double a, double b, int k);

// Time-interval summary statistics over [a, b]: mean relative deviation of
// the posterior median, mean relative credible-interval width, and mean
// envelope (the fraction of (replicate, grid point) pairs whose interval
// contains the truth, endpoints inclusive). Integrals use the trapezoid rule
// on the evaluation points inside [a, b] and normalize by the spanned length.
struct IntervalStats {
  double mrd = 0.0;
  double mrw = 0.0;
  double me = 0.0;
  double span = 0.0;  // length actually covered by evaluation points
};
IntervalStats interval_stats(const StudyResult& res, double a, double b);

// Pointwise ensemble statistics on the evaluation grid.
struct PointwiseStats {
  std::vector<double> t;
  std::vector<double> mpmedian;  // mean of posterior medians
  std::vector<double> mre;       // mean of (median - truth)/truth, signed
  std::vector<double> mrw;       // mean of interval width / truth
};
PointwiseStats pointwise_stats(const StudyResult& res);

// Truth-free relative width: the integrand divides the interval width by the
// estimated median. Each summary integrates over its own grid midpoints
// inside [a, b].
double emrw(const std::vector<PosteriorSummary>& summaries, double a, double b);

}  // namespace bnpr

#endif  // BNPR_METRICS_HPP
