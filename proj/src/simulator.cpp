#include "bnpr/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace bnpr {

std::mt19937_64 make_rng(std::uint64_t master_seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<unsigned>(master_seed & 0xffffffffu),
                    static_cast<unsigned>(master_seed >> 32),
                    static_cast<unsigned>(stream & 0xffffffffu),
                    static_cast<unsigned>(stream >> 32)};
  return std::mt19937_64(seq);
}

double seasonal_ne(double a, double o, double t) {
  double u = std::fmod(t + o, 12.0);
  if (u < 0.0) u += 12.0;
  if (u <= 6.0) {
    return 10.0 + 90.0 / (1.0 + std::exp(a * (3.0 - u)));
  }
  return 10.0 + 90.0 / (1.0 + std::exp(a * (3.0 + u - 12.0)));
}

double IntensityFn::at(double t) const {
  if (t < breaks.front() || t > breaks.back()) return 0.0;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  std::size_t j = static_cast<std::size_t>(it - breaks.begin());
  if (j == 0) j = 1;
  if (j > levels.size()) j = levels.size();  // right endpoint closes the last segment
  return levels[j - 1];
}

double IntensityFn::total() const {
  double s = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    s += levels[j] * (breaks[j + 1] - breaks[j]);
  }
  return s;
}

void IntensityFn::rescale_total(double target) {
  double s = total();
  if (!(s > 0.0)) throw InvalidInput("intensity has zero mass, cannot rescale");
  double f = target / s;
  for (double& l : levels) l *= f;
}

IntensityFn constant_intensity(double lo, double hi, double rate) {
  if (!(hi > lo)) throw InvalidInput("constant_intensity: empty window");
  if (rate < 0.0) throw InvalidInput("constant_intensity: negative rate");
  IntensityFn f;
  f.kind = IntensityFn::Kind::ConstantRate;
  f.breaks = {lo, hi};
  f.levels = {rate};
  return f;
}

IntensityFn power_of_ne_intensity(const LogPopTrajectory& traj, double lo,
                                  double hi, double beta0, double beta1) {
  if (!(hi > lo)) throw InvalidInput("power_of_ne_intensity: empty window");
  if (!(beta0 > 0.0)) throw InvalidInput("power_of_ne_intensity: beta0 must be positive");
  IntensityFn f;
  f.kind = IntensityFn::Kind::PowerOfNe;
  const Grid& g = traj.grid;
  f.breaks.push_back(lo);
  double t = lo;
  while (t < hi) {
    Index j = g.cell_of(t);
    double cell_hi = (t >= g.t_max) ? hi : std::min(hi, g.upper(j));
    if (!(cell_hi > t)) cell_hi = hi;
    f.levels.push_back(beta0 * std::exp(beta1 * traj.gamma[j]));
    f.breaks.push_back(cell_hi);
    t = cell_hi;
  }
  return f;
}

IntensityFn negative_control_intensity(NegativeControlKind kind,
                                       std::uint64_t seed, double lo, double hi,
                                       int target_n) {
  if (!(hi > lo)) throw InvalidInput("negative_control_intensity: empty window");
  auto rng = make_rng(seed, 0x6e65676374ull);  // fixed stream tag
  IntensityFn f;
  if (kind == NegativeControlKind::PiecewiseConstant) {
    constexpr int kSegments = 10;
    f.kind = IntensityFn::Kind::PiecewiseConstant;
    std::uniform_real_distribution<double> ubreak(lo, hi);
    std::vector<double> cuts;
    for (int i = 0; i < kSegments - 1; ++i) cuts.push_back(ubreak(rng));
    std::sort(cuts.begin(), cuts.end());
    f.breaks.push_back(lo);
    for (double c : cuts) f.breaks.push_back(c);
    f.breaks.push_back(hi);
    std::uniform_real_distribution<double> ulevel(-2.0, 2.0);
    for (int i = 0; i < kSegments; ++i) f.levels.push_back(std::exp(ulevel(rng)));
  } else {
    constexpr int kCells = 200;
    f.kind = IntensityFn::Kind::BMTrajectory;
    double w = (hi - lo) / kCells;
    std::normal_distribution<double> step(0.0, std::sqrt(w));
    double level = 0.0;  // log scale
    f.breaks.push_back(lo);
    for (int i = 0; i < kCells; ++i) {
      f.levels.push_back(std::exp(level));
      f.breaks.push_back(lo + (i + 1) * w);
      level += step(rng);
    }
  }
  f.rescale_total(static_cast<double>(target_n));
  return f;
}

namespace {

std::vector<SamplingEvent> merge_times(std::vector<double> times, double tol) {
  std::sort(times.begin(), times.end());
  std::vector<SamplingEvent> events;
  for (double t : times) {
    if (!events.empty() && t - events.back().time <= tol) {
      events.back().n_tips += 1;
    } else {
      events.push_back({t, 1});
    }
  }
  return events;
}

}  // namespace

std::vector<SamplingEvent> sample_times(const IntensityFn& intensity, int target_n,
                                        std::uint64_t seed, CountMode mode,
                                        double merge_tol) {
  auto rng = make_rng(seed, 0x73616d70ull);
  std::vector<double> times;

  if (mode == CountMode::FixedCount) {
    if (intensity.kind != IntensityFn::Kind::ConstantRate) {
      throw InvalidInput("sample_times: fixed-count mode needs a constant rate");
    }
    std::uniform_real_distribution<double> u(intensity.window_lo(),
                                             intensity.window_hi());
    for (int i = 0; i < target_n; ++i) times.push_back(u(rng));
    return merge_times(std::move(times), merge_tol);
  }

  IntensityFn lambda = intensity;
  if (lambda.kind == IntensityFn::Kind::PowerOfNe) {
    if (!(lambda.total() > 0.0) && target_n > 0) {
      throw InvalidInput("sample_times: zero total intensity");
    }
    lambda.rescale_total(static_cast<double>(target_n));
  }

  // Thinning against the per-segment constant bound. The bound equals the
  // intensity inside each segment, so candidate acceptance is exact.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < lambda.levels.size(); ++s) {
    double a = lambda.breaks[s], b = lambda.breaks[s + 1];
    double bound = lambda.levels[s];
    if (!(bound > 0.0)) continue;
    std::poisson_distribution<int> count(bound * (b - a));
    int m = count(rng);
    std::uniform_real_distribution<double> u(a, b);
    for (int i = 0; i < m; ++i) {
      double t = u(rng);
      if (unit(rng) * bound <= lambda.at(t)) times.push_back(t);
    }
  }
  return merge_times(std::move(times), merge_tol);
}

namespace {

// Solves cumhaz(T, t*) = e for the piecewise-constant hazard
// rate(t) = coal_factor * exp(-gamma(t)).
double invert_hazard(const LogPopTrajectory& traj, double start, double coal_factor,
                     double e) {
  const Grid& g = traj.grid;
  double t = start;
  for (Index j = g.cell_of(start);; ++j) {
    double rate = coal_factor * std::exp(-traj.gamma[std::min(j, g.cells - 1)]);
    if (j >= g.cells - 1) return t + e / rate;
    double seg = rate * (g.upper(j) - t);
    if (e <= seg) return t + e / rate;
    e -= seg;
    t = g.upper(j);
  }
}

}  // namespace

SimulatedTree simulate_coalescent_tree(const std::vector<SamplingEvent>& samples,
                                       const LogPopTrajectory& traj,
                                       std::uint64_t seed, double s0) {
  int n = 0;
  for (const auto& e : samples) n += e.n_tips;
  if (n < 2) throw InvalidInput("simulate_coalescent: need at least 2 tips");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].time > samples[i - 1].time)) {
      throw InvalidInput("simulate_coalescent: sampling events must be ascending");
    }
  }

  auto rng = make_rng(seed, 0x636f616cull);
  std::exponential_distribution<double> unit_exp(1.0);

  SimulatedTree out;
  Tree& tree = out.tree;
  std::vector<double> node_time;
  std::vector<int> active_nodes;
  std::vector<double> coal_times;

  auto add_tips = [&](const SamplingEvent& e) {
    for (int i = 0; i < e.n_tips; ++i) {
      Tree::Node nd;
      nd.label = "t" + std::to_string(tree.nodes.size() + 1);
      tree.nodes.push_back(nd);
      node_time.push_back(e.time);
      active_nodes.push_back(static_cast<int>(tree.nodes.size()) - 1);
    }
  };

  std::size_t next_event = 0;
  double now = samples[0].time;
  add_tips(samples[next_event++]);

  while (static_cast<int>(coal_times.size()) < n - 1) {
    int a = static_cast<int>(active_nodes.size());
    if (a < 2) {
      now = samples[next_event].time;
      add_tips(samples[next_event++]);
      continue;
    }
    double c = 0.5 * static_cast<double>(a) * (a - 1);
    double t_star = invert_hazard(traj, now, c, unit_exp(rng));
    if (next_event < samples.size() && t_star > samples[next_event].time) {
      now = samples[next_event].time;
      add_tips(samples[next_event++]);
      continue;  // hazard changed; fresh exponential by the Markov property
    }

    // join a uniformly chosen pair
    std::uniform_int_distribution<int> pick1(0, a - 1);
    int i1 = pick1(rng);
    int child1 = active_nodes[i1];
    active_nodes[i1] = active_nodes.back();
    active_nodes.pop_back();
    std::uniform_int_distribution<int> pick2(0, a - 2);
    int i2 = pick2(rng);
    int child2 = active_nodes[i2];

    Tree::Node parent;
    parent.left = child1;
    parent.right = child2;
    tree.nodes.push_back(parent);
    int pid = static_cast<int>(tree.nodes.size()) - 1;
    tree.nodes[child1].parent = pid;
    tree.nodes[child2].parent = pid;
    node_time.push_back(t_star);
    active_nodes[i2] = pid;

    coal_times.push_back(t_star);
    now = t_star;
  }

  tree.root = static_cast<int>(tree.nodes.size()) - 1;
  double root_time = node_time[tree.root];
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    tree.nodes[i].depth = root_time - node_time[i];
    if (tree.nodes[i].parent >= 0) {
      tree.nodes[i].branch_length = node_time[tree.nodes[i].parent] - node_time[i];
    }
  }

  out.genealogy.samp_events = samples;
  out.genealogy.coal_times = std::move(coal_times);
  out.genealogy.s0 = s0 < 0.0 ? samples.back().time : s0;
  out.genealogy.validate();
  return out;
}

Genealogy simulate_coalescent(const std::vector<SamplingEvent>& samples,
                              const LogPopTrajectory& traj, std::uint64_t seed,
                              double s0) {
  return simulate_coalescent_tree(samples, traj, seed, s0).genealogy;
}

}  // namespace bnpr
