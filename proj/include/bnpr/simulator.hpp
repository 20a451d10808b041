#ifndef BNPR_SIMULATOR_HPP
#define BNPR_SIMULATOR_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "bnpr/genealogy.hpp"
#include "bnpr/grid.hpp"

namespace bnpr {

// Independent generator stream derived from (master seed, stream index), so
// replicate results do not depend on scheduling order.
std::mt19937_64 make_rng(std::uint64_t master_seed, std::uint64_t stream);

// Seasonal effective population size family, period 12 in t (nominal
// months): a logistic rise to ~100 over the first half of the cycle and the
// mirrored decline over the second; o shifts which season t = 0 lands in.
double seasonal_ne(double a, double o, double t);

// Trajectory with gamma_j = log(fn(midpoint_j)).
template <class Fn>
LogPopTrajectory discretize(Fn&& fn, const Grid& grid) {
  LogPopTrajectory traj;
  traj.grid = grid;
  traj.gamma.resize(grid.cells);
  for (Index j = 0; j < grid.cells; ++j) {
    traj.gamma[j] = std::log(fn(grid.midpoint(j)));
  }
  return traj;
}

// Piecewise-constant sampling intensity on [breaks.front(), breaks.back()].
// Every supported intensity reduces to this form, which gives an exact
// per-segment bound for thinning.
struct IntensityFn {
  enum class Kind { ConstantRate, PowerOfNe, PiecewiseConstant, BMTrajectory };
  Kind kind = Kind::ConstantRate;
  std::vector<double> breaks;  // m+1 ascending
  std::vector<double> levels;  // m, nonnegative

  double window_lo() const { return breaks.front(); }
  double window_hi() const { return breaks.back(); }
  double at(double t) const;
  double total() const;  // integral of the intensity over the window
  void rescale_total(double target);
};

IntensityFn constant_intensity(double lo, double hi, double rate);

// lambda(t) = beta0 * N(t)^beta1 at the trajectory's cell resolution.
IntensityFn power_of_ne_intensity(const LogPopTrajectory& traj, double lo,
                                  double hi, double beta0, double beta1);

enum class NegativeControlKind { PiecewiseConstant, BMTrajectory };

// Sampling intensities independent of any population trajectory, rescaled so
// the expected event count equals target_n. PiecewiseConstant: 10 segments
// at uniform breakpoints with log-uniform levels in exp(+-2). BMTrajectory:
// exponentiated standard Brownian motion (unit variance per time unit) on a
// 200-cell grid.
IntensityFn negative_control_intensity(NegativeControlKind kind,
                                       std::uint64_t seed, double lo, double hi,
                                       int target_n);

enum class CountMode {
  PoissonProcess,  // inhomogeneous Poisson process via thinning
  FixedCount,      // exactly target_n draws (ConstantRate only)
};

// Sampling times on the intensity's window, ascending, with times closer
// than merge_tol collapsed into multiplicities. PowerOfNe intensities are
// rescaled so the expected count equals target_n; ConstantRate is used
// as given in PoissonProcess mode.
std::vector<SamplingEvent> sample_times(const IntensityFn& intensity, int target_n,
                                        std::uint64_t seed,
                                        CountMode mode = CountMode::PoissonProcess,
                                        double merge_tol = kEventTimeTol);

// Heterochronous coalescent simulation by exact inversion of the
// piecewise-constant cumulative hazard A(A-1)/(2 N(t)) against unit
// exponentials; the trajectory extends past its grid by constant
// extrapolation. s0 < 0 means "use the oldest sampling time".
Genealogy simulate_coalescent(const std::vector<SamplingEvent>& samples,
                              const LogPopTrajectory& traj, std::uint64_t seed,
                              double s0 = -1.0);

// Same draw, also materializing a uniformly chosen topology; tips are
// labeled t1..tn in time order. extract_events on the tree reproduces the
// genealogy up to the shift that puts the most recent tip at time 0.
struct SimulatedTree {
  Genealogy genealogy;
  Tree tree;
};
SimulatedTree simulate_coalescent_tree(const std::vector<SamplingEvent>& samples,
                                       const LogPopTrajectory& traj,
                                       std::uint64_t seed, double s0 = -1.0);

}  // namespace bnpr

#endif  // BNPR_SIMULATOR_HPP
