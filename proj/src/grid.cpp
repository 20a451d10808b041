#include "bnpr/grid.hpp"

#include <cmath>
#include <ostream>

namespace bnpr {

Grid build_grid(double t_min, double t_max, Index cells) {
  if (!std::isfinite(t_min) || !std::isfinite(t_max)) {
    throw InvalidInput("build_grid: bounds must be finite");
  }
  if (!(t_min < t_max)) {
    throw InvalidInput("build_grid: need t_min < t_max");
  }
  if (cells < 2) {
    throw InvalidInput("build_grid: need at least 2 cells");
  }
  Grid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.cells = cells;
  g.width = (t_max - t_min) / static_cast<double>(cells);
  return g;
}

double integrate_exp(const LogPopTrajectory& traj, double p, double a, double b) {
  if (!std::isfinite(p)) throw InvalidInput("integrate_exp: p must be finite");
  if (a > b) throw InvalidInput("integrate_exp: need a <= b");
  if (a == b) return 0.0;
  if (p == 0.0) return b - a;

  const Grid& g = traj.grid;
  double total = 0.0;

  // Portion below the grid: first cell's level extends downward.
  if (a < g.t_min) {
    double hi = std::min(b, g.t_min);
    total += std::exp(p * traj.gamma[0]) * (hi - a);
    a = hi;
    if (a >= b) return total;
  }
  // Portion beyond the grid: last cell's level extends upward.
  if (b > g.t_max) {
    double lo = std::max(a, g.t_max);
    total += std::exp(p * traj.gamma[g.cells - 1]) * (b - lo);
    b = lo;
    if (a >= b) return total;
  }

  Index j0 = g.cell_of(a);
  Index j1 = g.cell_of(b);
  for (Index j = j0; j <= j1; ++j) {
    double lo = std::max(a, g.lower(j));
    double hi = std::min(b, g.upper(j));
    if (hi > lo) total += std::exp(p * traj.gamma[j]) * (hi - lo);
  }
  return total;
}

void write_trajectory_csv(std::ostream& os, const LogPopTrajectory& traj) {
  os << "cell_index,midpoint_time,gamma,ne\n";
  char buf[160];
  for (Index j = 0; j < traj.grid.cells; ++j) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g\n",
                  static_cast<long long>(j + 1), traj.grid.midpoint(j),
                  traj.gamma[j], std::exp(traj.gamma[j]));
    os << buf;
  }
}

}  // namespace bnpr
