#include "bnpr/metrics.hpp"

#include <cmath>

namespace bnpr {

namespace {

// Trapezoid integral of f over the given points (already ascending).
template <class F>
double trapezoid(const std::vector<double>& t, F&& f) {
  double acc = 0.0;
  double prev_t = 0.0, prev_v = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double v = f(t[i]);
    if (i > 0) acc += 0.5 * (v + prev_v) * (t[i] - prev_t);
    prev_t = t[i];
    prev_v = v;
  }
  return acc;
}

std::vector<double> points_within(const std::vector<double>& t, double a, double b) {
  std::vector<double> out;
  for (double x : t) {
    if (x >= a && x <= b) out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<double> make_eval_times(double a, double b, int k) {
  if (!(b > a) || k < 1) throw InvalidInput("make_eval_times: bad arguments");
  std::vector<double> t(k + 1);
  for (int j = 0; j <= k; ++j) {
    t[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(k);
  }
  return t;
}

IntervalStats interval_stats(const StudyResult& res, double a, double b) {
  if (res.replicates.empty()) throw InvalidInput("interval_stats: no replicates");
  if (!(a < b)) throw InvalidInput("interval_stats: need a < b");
  std::vector<double> pts = points_within(res.eval_times, a, b);
  if (pts.size() < 2) {
    throw InvalidInput("interval_stats: interval contains too few evaluation points");
  }
  const double span = pts.back() - pts.front();

  IntervalStats stats;
  stats.span = span;
  long covered = 0, total = 0;
  for (const auto& rep : res.replicates) {
    const auto& s = rep.summary;
    auto med = [&](double t) { return s.ne_median[s.grid.cell_of(t)]; };
    auto lo = [&](double t) { return s.ne_q025[s.grid.cell_of(t)]; };
    auto hi = [&](double t) { return s.ne_q975[s.grid.cell_of(t)]; };
    auto truth = [&](double t) { return rep.truth.ne_at(t); };

    stats.mrd += trapezoid(pts, [&](double t) {
                   return std::abs(med(t) - truth(t)) / truth(t);
                 }) / span;
    stats.mrw += trapezoid(pts, [&](double t) {
                   return (hi(t) - lo(t)) / truth(t);
                 }) / span;
    for (double t : pts) {
      double n = truth(t);
      covered += (lo(t) <= n && n <= hi(t)) ? 1 : 0;
      ++total;
    }
  }
  double r = static_cast<double>(res.replicates.size());
  stats.mrd /= r;
  stats.mrw /= r;
  stats.me = static_cast<double>(covered) / static_cast<double>(total);
  return stats;
}

PointwiseStats pointwise_stats(const StudyResult& res) {
  if (res.replicates.empty()) throw InvalidInput("pointwise_stats: no replicates");
  PointwiseStats out;
  out.t = res.eval_times;
  std::size_t k = out.t.size();
  out.mpmedian.assign(k, 0.0);
  out.mre.assign(k, 0.0);
  out.mrw.assign(k, 0.0);
  for (const auto& rep : res.replicates) {
    const auto& s = rep.summary;
    for (std::size_t j = 0; j < k; ++j) {
      double t = out.t[j];
      double truth = rep.truth.ne_at(t);
      double med = s.ne_median[s.grid.cell_of(t)];
      double width = s.ne_q975[s.grid.cell_of(t)] - s.ne_q025[s.grid.cell_of(t)];
      out.mpmedian[j] += med;
      out.mre[j] += (med - truth) / truth;
      out.mrw[j] += width / truth;
    }
  }
  double r = static_cast<double>(res.replicates.size());
  for (std::size_t j = 0; j < k; ++j) {
    out.mpmedian[j] /= r;
    out.mre[j] /= r;
    out.mrw[j] /= r;
  }
  return out;
}

double emrw(const std::vector<PosteriorSummary>& summaries, double a, double b) {
  if (summaries.empty()) throw InvalidInput("emrw: no summaries");
  if (!(a < b)) throw InvalidInput("emrw: need a < b");
  double acc = 0.0;
  for (const auto& s : summaries) {
    std::vector<double> pts;
    for (Index j = 0; j < s.grid.cells; ++j) {
      double t = s.grid.midpoint(j);
      if (t >= a && t <= b) pts.push_back(t);
    }
    if (pts.size() < 2) throw InvalidInput("emrw: interval contains too few cells");
    double span = pts.back() - pts.front();
    acc += trapezoid(pts, [&](double t) {
             Index j = s.grid.cell_of(t);
             return (s.ne_q975[j] - s.ne_q025[j]) / s.ne_median[j];
           }) / span;
  }
  return acc / static_cast<double>(summaries.size());
}

}  // namespace bnpr
