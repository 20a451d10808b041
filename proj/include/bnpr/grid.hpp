#ifndef BNPR_GRID_HPP
#define BNPR_GRID_HPP

#include <iosfwd>

#include "bnpr/common.hpp"

namespace bnpr {

// Regular discretization of time. Time 0 is the most recent sample and
// increases into the past. Cell j (0-based) covers
// [t_min + j*w, t_min + (j+1)*w); the last cell is closed at t_max.
// Times at or beyond t_max clamp to the last cell.
struct Grid {
  double t_min = 0.0;
  double t_max = 0.0;
  Index cells = 0;
  double width = 0.0;

  Index cell_of(double t) const {
    auto j = static_cast<Index>((t - t_min) / width);
    if (j < 0) return 0;
    if (j >= cells) return cells - 1;
    return j;
  }
  double lower(Index j) const { return t_min + static_cast<double>(j) * width; }
  double upper(Index j) const { return t_min + static_cast<double>(j + 1) * width; }
  double midpoint(Index j) const { return t_min + (static_cast<double>(j) + 0.5) * width; }

  bool operator==(const Grid& other) const = default;
};

// Piecewise-constant log effective population size on a grid.
// N(t) = exp(gamma[cell_of(t)]); constant extrapolation beyond the grid.
struct LogPopTrajectory {
  Grid grid;
  Vector gamma;

  double log_ne_at(double t) const { return gamma[grid.cell_of(t)]; }
  double ne_at(double t) const { return std::exp(log_ne_at(t)); }
};

Grid build_grid(double t_min, double t_max, Index cells);

// Exact integral of exp(p * gamma(t)) over [a, b] for the step trajectory,
// with constant extrapolation outside the grid support.
double integrate_exp(const LogPopTrajectory& traj, double p, double a, double b);

// CSV with columns (cell_index, midpoint_time, gamma, ne); cell_index is 1-based.
void write_trajectory_csv(std::ostream& os, const LogPopTrajectory& traj);

}  // namespace bnpr

#endif  // BNPR_GRID_HPP
