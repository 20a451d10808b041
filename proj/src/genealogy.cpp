#include "bnpr/genealogy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace bnpr {

namespace {

class NewickParser {
 public:
  explicit NewickParser(const std::string& text) : text_(text) {}

  Tree parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty Newick input", 0);
    Tree tree;
    int root = parse_subtree(tree, true);
    tree.root = root;
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ';') {
      throw ParseError("missing trailing semicolon", pos_);
    }
    ++pos_;
    skip_ws();
    if (pos_ < text_.size()) throw ParseError("trailing content after semicolon", pos_);
    assign_depths(tree);
    return tree;
  }

 private:
  int parse_subtree(Tree& tree, bool at_root) {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    int node;
    if (text_[pos_] == '(') {
      std::size_t open_at = pos_;
      ++pos_;
      int left = parse_subtree(tree, false);
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ',') {
        throw ParseError("internal node needs exactly two children", open_at);
      }
      ++pos_;
      int right = parse_subtree(tree, false);
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        throw ParseError("polytomy: more than two children", open_at);
      }
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        throw ParseError("unbalanced parentheses", open_at);
      }
      ++pos_;
      node = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes[node].left = left;
      tree.nodes[node].right = right;
      tree.nodes[left].parent = node;
      tree.nodes[right].parent = node;
      tree.nodes[node].label = parse_label();  // optional internal label
    } else {
      std::string label = parse_label();
      if (label.empty()) throw ParseError("expected tip label", pos_);
      node = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes[node].label = std::move(label);
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      tree.nodes[node].branch_length = parse_number();
    } else if (!at_root) {
      throw ParseError("missing branch length", pos_);
    }
    return node;
  }

  std::string parse_label() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  double parse_number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a branch length", pos_);
    if (!std::isfinite(v)) throw ParseError("non-finite branch length", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void assign_depths(Tree& tree) {
    // Nodes were appended children-first, so a forward pass cannot be used;
    // walk from the root instead.
    std::vector<int> stack{tree.root};
    tree.nodes[tree.root].depth = 0.0;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      const auto& nd = tree.nodes[i];
      if (!nd.is_tip()) {
        tree.nodes[nd.left].depth = nd.depth + tree.nodes[nd.left].branch_length;
        tree.nodes[nd.right].depth = nd.depth + tree.nodes[nd.right].branch_length;
        stack.push_back(nd.left);
        stack.push_back(nd.right);
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

void serialize_node(const Tree& tree, int i, bool at_root, std::string& out) {
  const auto& nd = tree.nodes[i];
  if (!nd.is_tip()) {
    out += '(';
    serialize_node(tree, nd.left, false, out);
    out += ',';
    serialize_node(tree, nd.right, false, out);
    out += ')';
  }
  out += nd.label;
  if (!at_root) {
    char buf[40];
    std::snprintf(buf, sizeof buf, ":%.17g", nd.branch_length);
    out += buf;
  }
}

double max_tip_depth(const Tree& tree) {
  double m = 0.0;
  for (const auto& nd : tree.nodes) {
    if (nd.is_tip()) m = std::max(m, nd.depth);
  }
  return m;
}

Genealogy events_from_times(std::vector<double> tip_times,
                            std::vector<double> coal_times, double tol) {
  std::sort(tip_times.begin(), tip_times.end());
  std::sort(coal_times.begin(), coal_times.end());

  Genealogy gen;
  for (double t : tip_times) {
    if (!gen.samp_events.empty() && t - gen.samp_events.back().time <= tol) {
      gen.samp_events.back().n_tips += 1;
    } else {
      gen.samp_events.push_back({t, 1});
    }
  }
  for (std::size_t i = 1; i < coal_times.size(); ++i) {
    if (coal_times[i] - coal_times[i - 1] <= tol) {
      throw InvalidInput(
          "coincident coalescent times violate the binary-merger assumption");
    }
  }
  gen.coal_times = std::move(coal_times);
  gen.s0 = gen.samp_events.back().time;
  gen.validate();
  return gen;
}

}  // namespace

Tree parse_newick(const std::string& text) { return NewickParser(text).parse(); }

std::string serialize_newick(const Tree& tree) {
  if (tree.root < 0) throw InvalidInput("serialize_newick: empty tree");
  std::string out;
  serialize_node(tree, tree.root, true, out);
  out += ';';
  return out;
}

void Genealogy::validate() const {
  if (tip_count() < 2) throw InvalidInput("genealogy needs at least 2 tips");
  for (std::size_t i = 0; i < samp_events.size(); ++i) {
    const auto& e = samp_events[i];
    if (!std::isfinite(e.time) || e.time < 0.0 || e.n_tips < 1) {
      throw InvalidInput("malformed sampling event");
    }
    if (i > 0 && !(e.time > samp_events[i - 1].time)) {
      throw InvalidInput("sampling events must be strictly ascending in time");
    }
  }
  if (static_cast<int>(coal_times.size()) != tip_count() - 1) {
    throw InvalidInput("genealogy needs exactly n-1 coalescent events");
  }
  for (std::size_t i = 0; i < coal_times.size(); ++i) {
    if (!std::isfinite(coal_times[i])) throw InvalidInput("non-finite coalescent time");
    if (i > 0 && !(coal_times[i] > coal_times[i - 1])) {
      throw InvalidInput("coalescent times must be strictly ascending");
    }
  }
  if (!(s0 >= samp_events.back().time)) {
    throw InvalidInput("sampling window must cover the oldest sampling event");
  }
  // Lineage ledger: every coalescence needs two active lineages.
  std::size_t si = 0;
  int active = 0;
  for (double tc : coal_times) {
    while (si < samp_events.size() && samp_events[si].time <= tc) {
      active += samp_events[si].n_tips;
      ++si;
    }
    if (active < 2) {
      throw InvalidInput("coalescent event with fewer than 2 active lineages");
    }
    active -= 1;
  }
}

Genealogy extract_events(const Tree& tree, double tol) {
  if (tree.tip_count() < 2) throw InvalidInput("extract_events: tree has < 2 tips");
  double m = max_tip_depth(tree);
  std::vector<double> tip_times, coal_times;
  for (const auto& nd : tree.nodes) {
    (nd.is_tip() ? tip_times : coal_times).push_back(m - nd.depth);
  }
  return events_from_times(std::move(tip_times), std::move(coal_times), tol);
}

Genealogy extract_events(const Tree& tree,
                         const std::unordered_map<std::string, double>& tip_times,
                         double tol) {
  if (tree.tip_count() < 2) throw InvalidInput("extract_events: tree has < 2 tips");
  double m = max_tip_depth(tree);
  double shift = 0.0;
  bool have_shift = false;
  std::vector<double> times, coal_times;
  for (const auto& nd : tree.nodes) {
    if (!nd.is_tip()) {
      coal_times.push_back(m - nd.depth);
      continue;
    }
    auto it = tip_times.find(nd.label);
    if (it == tip_times.end()) {
      throw InvalidInput("sidecar is missing tip '" + nd.label + "'");
    }
    double geom = m - nd.depth;
    if (!have_shift) {
      shift = it->second - geom;
      have_shift = true;
    } else if (std::abs(it->second - geom - shift) > tol) {
      throw InvalidInput("sidecar time for tip '" + nd.label +
                         "' disagrees with tree geometry");
    }
    times.push_back(geom);
  }
  if (shift < -tol) {
    throw InvalidInput("sidecar places the most recent sample before time 0");
  }
  shift = std::max(shift, 0.0);
  for (double& t : times) t += shift;
  for (double& t : coal_times) t += shift;
  return events_from_times(std::move(times), std::move(coal_times), tol);
}

std::unordered_map<std::string, double> read_tip_times_tsv(std::istream& is) {
  std::unordered_map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InvalidInput("sidecar line " + std::to_string(lineno) +
                         ": expected label<TAB>time");
    }
    std::string label = line.substr(0, tab);
    try {
      out[label] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw InvalidInput("sidecar line " + std::to_string(lineno) +
                         ": unparseable time");
    }
  }
  return out;
}

void write_tip_times_tsv(std::ostream& os, const Tree& tree, double tol) {
  Genealogy gen = extract_events(tree, tol);
  (void)gen;  // geometry sanity check before writing
  double m = max_tip_depth(tree);
  char buf[64];
  for (const auto& nd : tree.nodes) {
    if (!nd.is_tip()) continue;
    std::snprintf(buf, sizeof buf, "%.17g", m - nd.depth);
    os << nd.label << '\t' << buf << '\n';
  }
}

IntervalData decompose_intervals(const Genealogy& gen, const Grid& grid) {
  gen.validate();
  const Index nb = grid.cells;

  IntervalData data;
  data.grid = grid;
  data.coal_pressure = Vector::Zero(nb);
  data.coal_counts = Vector::Zero(nb);
  data.samp_counts = Vector::Zero(nb);
  data.samp_exposure = Vector::Zero(nb);
  data.n_tips = gen.tip_count();

  // Overlap of [a, b] with each cell; the final cell absorbs anything beyond
  // the grid end (constant-extrapolation convention).
  auto spread = [&](double a, double b, double weight, Vector& target) {
    if (!(b > a) || weight == 0.0) return;
    for (Index j = grid.cell_of(a); j < nb; ++j) {
      double lo = std::max(a, grid.lower(j));
      double hi = (j == nb - 1) ? b : std::min(b, grid.upper(j));
      if (hi > lo) target[j] += weight * (hi - lo);
      if (j < nb - 1 && b <= grid.upper(j)) break;
    }
  };

  struct Event {
    double time;
    int delta;  // +n_tips for sampling, -1 for coalescence
  };
  std::vector<Event> events;
  events.reserve(gen.samp_events.size() + gen.coal_times.size());
  for (const auto& e : gen.samp_events) events.push_back({e.time, e.n_tips});
  for (double t : gen.coal_times) events.push_back({t, -1});
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.delta > b.delta;  // sampling first on ties
  });

  int active = 0;
  double t_prev = events.front().time;
  for (const auto& e : events) {
    if (e.time > t_prev) {
      if (active >= 2) {
        double c = 0.5 * static_cast<double>(active) * (active - 1);
        spread(t_prev, e.time, c, data.coal_pressure);
      }
      t_prev = e.time;
    }
    if (e.delta > 0) {
      active += e.delta;
      data.samp_counts[grid.cell_of(e.time)] += e.delta;
    } else {
      if (active < 2) {
        throw InvalidInput("decompose_intervals: malformed genealogy "
                           "(coalescence with fewer than 2 active lineages)");
      }
      active -= 1;
      data.coal_counts[grid.cell_of(e.time)] += 1.0;
    }
  }

  spread(0.0, gen.s0, 1.0, data.samp_exposure);
  return data;
}

void write_interval_data_csv(std::ostream& os, const IntervalData& data) {
  os << "cell_index,midpoint_time,coal_pressure,coal_count,samp_count,samp_exposure\n";
  char buf[200];
  for (Index j = 0; j < data.grid.cells; ++j) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%g,%g,%.9g\n",
                  static_cast<long long>(j + 1), data.grid.midpoint(j),
                  data.coal_pressure[j], data.coal_counts[j],
                  data.samp_counts[j], data.samp_exposure[j]);
    os << buf;
  }
}

}  // namespace bnpr
