#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddbd/lp.hpp"

namespace ddbd::dd {

using Sense = lp::Sense;

inline constexpr double kCutTol = 1e-7;
inline constexpr double kLhsKeyScale = 1e9;
// state components at or above this value print as "inf"
inline constexpr std::int64_t kStateInfinity = std::int64_t{1} << 40;

class EmptyDiagram : public std::runtime_error {
 public:
  EmptyDiagram() : std::runtime_error("decision diagram has no root-terminal path") {}
};
class InfeasibleDiagram : public std::runtime_error {
 public:
  InfeasibleDiagram() : std::runtime_error("refinement removed every path") {}
};
class PathExplosion : public std::runtime_error {
 public:
  explicit PathExplosion(std::size_t cap)
      : std::runtime_error("path enumeration exceeded cap of " + std::to_string(cap)) {}
};

enum class LayerKind { Discrete, Continuous };

struct Label {
  double lo = 0.0;
  double hi = 0.0;
  bool interval = false;

  static Label point(double v) { return {v, v, false}; }
  static Label range(double lo, double hi) { return {lo, hi, true}; }
  double value() const { return lo; }
  bool operator==(const Label&) const = default;
};

using NodeState = std::vector<std::int64_t>;

struct Node {
  bool merged = false;
  NodeState state;
};

// On continuous layers weight is the per-unit slope applied to the chosen
// endpoint; on discrete layers it is the arc's fixed contribution.
struct Arc {
  std::size_t tail = 0;
  std::size_t head = 0;
  Label label;
  double weight = 0.0;
};

enum class CutSense { Le, Ge };

// sum coeffs[j]*x_j + z_coeff*z  (<= | >=)  rhs ; j indexes discrete arc layers
struct CutRow {
  std::map<std::size_t, double> coeffs;
  double z_coeff = 0.0;
  double rhs = 0.0;
  CutSense sense = CutSense::Le;

  bool is_feasibility() const { return z_coeff == 0.0; }
  double lhs_x(const std::vector<double>& x) const;
  // x may include z as its last entry when z_coeff != 0
  bool satisfied_by(const std::vector<double>& x, double z = 0.0, double tol = kCutTol) const;
  std::string to_string() const;
};

class DecisionDiagram {
 public:
  DecisionDiagram();
  explicit DecisionDiagram(std::vector<LayerKind> kinds);

  // Trie over explicit paths on discrete layers, zero weights.
  static DecisionDiagram from_paths(const std::vector<std::vector<double>>& paths);

  std::size_t num_arc_layers() const { return kinds_.size(); }
  std::size_t num_node_layers() const { return nodes_.size(); }
  std::size_t layer_size(std::size_t node_layer) const { return nodes_.at(node_layer).size(); }
  const std::vector<Node>& layer(std::size_t node_layer) const { return nodes_.at(node_layer); }
  // raw access; callers keep arc endpoints consistent
  std::vector<Node>& layer_mut(std::size_t node_layer) { return nodes_.at(node_layer); }
  Node& node(std::size_t node_layer, std::size_t idx) { return nodes_.at(node_layer).at(idx); }
  const Node& node(std::size_t node_layer, std::size_t idx) const { return nodes_.at(node_layer).at(idx); }
  const std::vector<Arc>& arcs(std::size_t arc_layer) const { return arcs_.at(arc_layer); }
  std::vector<Arc>& arcs_mut(std::size_t arc_layer) { return arcs_.at(arc_layer); }
  LayerKind kind(std::size_t arc_layer) const { return kinds_.at(arc_layer); }
  const std::vector<LayerKind>& kinds() const { return kinds_; }
  bool has_continuous_layer() const;
  std::size_t num_discrete_layers() const;

  std::size_t add_node(std::size_t node_layer, Node n = {});
  void add_arc(std::size_t arc_layer, const Arc& a);

  std::size_t width() const;
  std::size_t num_nodes() const;
  std::size_t num_arcs() const;
  bool empty() const;

  // Drops nodes and arcs off every root-terminal path and renumbers. An
  // empty result keeps only the root.
  void cleanup();

 private:
  void check_kinds() const;

  std::vector<LayerKind> kinds_;
  std::vector<std::vector<Node>> nodes_;
  std::vector<std::vector<Arc>> arcs_;
};

struct Path {
  std::vector<double> assignment;
  double value = 0.0;
};

// Value an arc contributes under the given sense and the label it picks.
std::pair<double, double> arc_contribution(const Arc& a, Sense sense);

Path optimal_path(const DecisionDiagram& dd, Sense sense);

// For every node of every layer: best root-to-node value and prefix labels
// (lexicographically smallest among ties). Unreachable nodes get no prefix.
struct Prefix {
  bool reachable = false;
  double value = 0.0;
  std::vector<double> labels;
};
std::vector<std::vector<Prefix>> optimal_prefixes(const DecisionDiagram& dd, Sense sense);

inline constexpr std::size_t kDefaultPathCap = 1'000'000;
std::vector<std::vector<double>> enumerate_solutions(const DecisionDiagram& dd,
                                                     std::size_t cap = kDefaultPathCap);
// Same, paired with path weight (interval arcs use slope * endpoint).
std::vector<Path> enumerate_paths(const DecisionDiagram& dd, std::size_t cap = kDefaultPathCap);

DecisionDiagram reduce_interval_arcs(const DecisionDiagram& dd, const std::set<std::size_t>& layers);

enum class RefineMode { Exact, Relaxed };
DecisionDiagram refine_with_cut(const DecisionDiagram& dd, const CutRow& cut, RefineMode mode);

using StateMerge = std::function<NodeState(const std::vector<NodeState>&)>;
DecisionDiagram merge_nodes(const DecisionDiagram& dd, std::size_t node_layer,
                            const std::vector<std::size_t>& nodes, const StateMerge& state_merge);

// Bottom-up merge of nodes whose outgoing arc sets coincide.
DecisionDiagram merge_equivalent_nodes(const DecisionDiagram& dd);

// Copy of a discrete diagram with one continuous layer [lo, hi] appended; the
// old terminal becomes the tail of the new interval arc.
DecisionDiagram append_continuous_layer(const DecisionDiagram& dd, double lo, double hi, double slope = 1.0);

std::string to_dot(const DecisionDiagram& dd);

}  // namespace ddbd::dd
