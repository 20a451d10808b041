#ifndef BNPR_GENEALOGY_HPP
#define BNPR_GENEALOGY_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "bnpr/common.hpp"
#include "bnpr/grid.hpp"

namespace bnpr {

// Rooted binary tree with branch lengths. depth = sum of branch lengths from
// the root; the root has depth 0.
struct Tree {
  struct Node {
    std::string label;
    double branch_length = 0.0;  // to parent; unused at the root
    double depth = 0.0;
    int parent = -1;
    int left = -1;
    int right = -1;
    bool is_tip() const { return left < 0; }
  };
  std::vector<Node> nodes;
  int root = -1;

  int tip_count() const {
    int n = 0;
    for (const auto& nd : nodes) n += nd.is_tip() ? 1 : 0;
    return n;
  }
};

// Single rooted binary Newick string with branch lengths on all non-root
// edges; polytomies are rejected. Errors carry the character offset.
Tree parse_newick(const std::string& text);

// Inverse of parse_newick up to float formatting.
std::string serialize_newick(const Tree& tree);

// One sampling event: n_tips lineages enter at `time`.
struct SamplingEvent {
  double time = 0.0;
  int n_tips = 0;
};

// Sufficient statistics of a dated genealogy: sampling events (ascending,
// most recent first) and coalescent times (ascending). Times are measured
// backward from the present; tips carry time >= 0.
struct Genealogy {
  std::vector<SamplingEvent> samp_events;
  std::vector<double> coal_times;
  double s0 = 0.0;  // sampling-window right endpoint

  int tip_count() const {
    int n = 0;
    for (const auto& e : samp_events) n += e.n_tips;
    return n;
  }
  double root_time() const { return coal_times.empty() ? 0.0 : coal_times.back(); }

  // Checks event ordering, the lineage-count ledger (a coalescence needs two
  // active lineages), and the coalescent event count.
  void validate() const;
};

inline constexpr double kEventTimeTol = 1e-6;

// Tip and coalescent times from tree geometry: time = max tip depth - depth,
// so the deepest tip sits at time 0. Tips closer than tol merge into one
// sampling event; coalescent ties within tol are rejected.
Genealogy extract_events(const Tree& tree, double tol = kEventTimeTol);

// Sidecar override, label -> absolute tip time. Times must agree with tree
// geometry up to a common shift (within tol); the shift is applied to all
// events, so the most recent sample may sit later than time 0.
Genealogy extract_events(const Tree& tree,
                         const std::unordered_map<std::string, double>& tip_times,
                         double tol = kEventTimeTol);

// `label<TAB>time` per line; '#' comments and blank lines skipped.
std::unordered_map<std::string, double> read_tip_times_tsv(std::istream& is);
void write_tip_times_tsv(std::ostream& os, const Tree& tree, double tol = kEventTimeTol);

// Per-cell sufficient statistics for both likelihoods.
struct IntervalData {
  Grid grid;
  Vector coal_pressure;   // E_j: sum over segments of C * overlap with cell j
  Vector coal_counts;     // d_j: coalescent events per cell
  Vector samp_counts;     // c_j: sampled individuals per cell
  Vector samp_exposure;   // overlap of [0, s0] with cell j
  int n_tips = 0;

  bool has_sampling() const { return samp_exposure.sum() > 0.0; }
};

// Walks the merged event sequence, tracking the active-lineage count, and
// accumulates each inter-event segment's coalescent pressure C = A(A-1)/2
// onto the grid cells it overlaps.
IntervalData decompose_intervals(const Genealogy& gen, const Grid& grid);

// Debug dump: one row per cell.
void write_interval_data_csv(std::ostream& os, const IntervalData& data);

}  // namespace bnpr

#endif  // BNPR_GENEALOGY_HPP
