#include "ddbd/decision_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace ddbd::dd {

double CutRow::lhs_x(const std::vector<double>& x) const {
  double s = 0.0;
  for (auto [j, c] : coeffs) {
    if (j >= x.size()) throw std::out_of_range("cut references variable beyond assignment");
    s += c * x[j];
  }
  return s;
}

bool CutRow::satisfied_by(const std::vector<double>& x, double z, double tol) const {
  const double lhs = lhs_x(x) + z_coeff * z;
  return sense == CutSense::Le ? lhs <= rhs + tol : lhs >= rhs - tol;
}

std::string CutRow::to_string() const {
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (auto [j, c] : coeffs) {
    if (c == 0.0) continue;
    os << (first ? "" : " + ") << c << "*x" << j;
    first = false;
  }
  if (z_coeff != 0.0) {
    os << (first ? "" : " + ") << z_coeff << "*z";
    first = false;
  }
  if (first) os << "0";
  os << (sense == CutSense::Le ? " <= " : " >= ") << rhs;
  return os.str();
}

DecisionDiagram::DecisionDiagram() : nodes_(1) { nodes_[0].push_back({}); }

DecisionDiagram::DecisionDiagram(std::vector<LayerKind> kinds)
    : kinds_(std::move(kinds)), nodes_(kinds_.size() + 1), arcs_(kinds_.size()) {
  check_kinds();
  nodes_.front().push_back({});
  if (nodes_.size() > 1) nodes_.back().push_back({});
}

void DecisionDiagram::check_kinds() const {
  for (std::size_t j = 0; j < kinds_.size(); ++j)
    if (kinds_[j] == LayerKind::Continuous && j + 1 != kinds_.size())
      throw std::invalid_argument("continuous layer must be the last arc layer");
}

DecisionDiagram DecisionDiagram::from_paths(const std::vector<std::vector<double>>& paths) {
  if (paths.empty()) return DecisionDiagram();
  const std::size_t m = paths.front().size();
  DecisionDiagram dd(std::vector<LayerKind>(m, LayerKind::Discrete));
  // trie keyed by (parent, label)
  std::vector<std::map<std::pair<std::size_t, double>, std::size_t>> child(m);
  for (const auto& p : paths) {
    if (p.size() != m) throw std::invalid_argument("paths of differing lengths");
    std::size_t u = 0;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t v;
      if (j + 1 == m) {
        v = 0;
        const bool dup = std::any_of(dd.arcs_[j].begin(), dd.arcs_[j].end(), [&](const Arc& a) {
          return a.tail == u && a.label.lo == p[j];
        });
        if (!dup) dd.add_arc(j, Arc{u, v, Label::point(p[j]), 0.0});
      } else {
        auto key = std::make_pair(u, p[j]);
        auto it = child[j].find(key);
        if (it == child[j].end()) {
          v = dd.add_node(j + 1);
          child[j].emplace(key, v);
          dd.add_arc(j, Arc{u, v, Label::point(p[j]), 0.0});
        } else {
          v = it->second;
        }
      }
      u = v;
    }
  }
  return dd;
}

bool DecisionDiagram::has_continuous_layer() const {
  return !kinds_.empty() && kinds_.back() == LayerKind::Continuous;
}

std::size_t DecisionDiagram::num_discrete_layers() const {
  return kinds_.size() - (has_continuous_layer() ? 1 : 0);
}

std::size_t DecisionDiagram::add_node(std::size_t node_layer, Node n) {
  if (node_layer == 0 || node_layer + 1 >= nodes_.size())
    throw std::invalid_argument("nodes can only be added to interior layers");
  nodes_[node_layer].push_back(std::move(n));
  return nodes_[node_layer].size() - 1;
}

void DecisionDiagram::add_arc(std::size_t arc_layer, const Arc& a) {
  if (arc_layer >= arcs_.size()) throw std::out_of_range("arc layer out of range");
  if (a.tail >= nodes_[arc_layer].size() || a.head >= nodes_[arc_layer + 1].size())
    throw std::out_of_range("arc endpoint out of range");
  if (a.label.interval) {
    if (kinds_[arc_layer] != LayerKind::Continuous) throw std::invalid_argument("interval label on discrete layer");
    if (!(a.label.lo <= a.label.hi)) throw std::invalid_argument("interval label with lo > hi");
  }
  arcs_[arc_layer].push_back(a);
}

std::size_t DecisionDiagram::width() const {
  std::size_t w = 0;
  for (const auto& l : nodes_) w = std::max(w, l.size());
  return w;
}

std::size_t DecisionDiagram::num_nodes() const {
  std::size_t s = 0;
  for (const auto& l : nodes_) s += l.size();
  return s;
}

std::size_t DecisionDiagram::num_arcs() const {
  std::size_t s = 0;
  for (const auto& l : arcs_) s += l.size();
  return s;
}

bool DecisionDiagram::empty() const {
  if (nodes_.back().empty()) return true;
  std::vector<char> reach(1, 1);
  for (std::size_t j = 0; j < arcs_.size(); ++j) {
    std::vector<char> next(nodes_[j + 1].size(), 0);
    for (const auto& a : arcs_[j])
      if (reach[a.tail]) next[a.head] = 1;
    reach = std::move(next);
  }
  return std::none_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

void DecisionDiagram::cleanup() {
  const std::size_t m = arcs_.size();
  std::vector<std::vector<char>> fwd(m + 1), bwd(m + 1);
  fwd[0].assign(nodes_[0].size(), 0);
  fwd[0][0] = 1;
  for (std::size_t j = 0; j < m; ++j) {
    fwd[j + 1].assign(nodes_[j + 1].size(), 0);
    for (const auto& a : arcs_[j])
      if (fwd[j][a.tail]) fwd[j + 1][a.head] = 1;
  }
  bwd[m].assign(nodes_[m].size(), 1);
  for (std::size_t j = m; j-- > 0;) {
    bwd[j].assign(nodes_[j].size(), 0);
    for (const auto& a : arcs_[j])
      if (bwd[j + 1][a.head]) bwd[j][a.tail] = 1;
  }
  const bool has_path = m == 0 || (!nodes_[m].empty() && fwd[m][0]);
  if (!has_path) {
    Node root = nodes_[0][0];
    for (auto& l : nodes_) l.clear();
    for (auto& l : arcs_) l.clear();
    nodes_[0].push_back(std::move(root));
    return;
  }
  std::vector<std::vector<std::size_t>> remap(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    remap[j].assign(nodes_[j].size(), SIZE_MAX);
    std::vector<Node> kept;
    for (std::size_t i = 0; i < nodes_[j].size(); ++i) {
      if (fwd[j][i] && bwd[j][i]) {
        remap[j][i] = kept.size();
        kept.push_back(std::move(nodes_[j][i]));
      }
    }
    nodes_[j] = std::move(kept);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Arc> kept;
    for (auto a : arcs_[j]) {
      if (remap[j][a.tail] == SIZE_MAX || remap[j + 1][a.head] == SIZE_MAX) continue;
      a.tail = remap[j][a.tail];
      a.head = remap[j + 1][a.head];
      kept.push_back(a);
    }
    arcs_[j] = std::move(kept);
  }
}

std::pair<double, double> arc_contribution(const Arc& a, Sense sense) {
  if (!a.label.interval) return {a.weight, a.label.lo};
  const double vlo = a.weight * a.label.lo;
  const double vhi = a.weight * a.label.hi;
  const bool take_hi = sense == Sense::Max ? vhi > vlo : vhi < vlo;
  return take_hi ? std::make_pair(vhi, a.label.hi) : std::make_pair(vlo, a.label.lo);
}

namespace {

bool better(double a, double b, Sense s) { return s == Sense::Max ? a > b : a < b; }

double tie_tol(double v) { return 1e-9 * (1.0 + std::abs(v)); }

}  // namespace

std::vector<std::vector<Prefix>> optimal_prefixes(const DecisionDiagram& dd, Sense sense) {
  const std::size_t m = dd.num_arc_layers();
  std::vector<std::vector<Prefix>> best(m + 1);
  for (std::size_t j = 0; j <= m; ++j) best[j].resize(dd.layer_size(j));
  if (dd.layer_size(0) == 0) return best;
  best[0][0].reachable = true;
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& a : dd.arcs(j)) {
      const Prefix& pu = best[j][a.tail];
      if (!pu.reachable) continue;
      auto [w, lab] = arc_contribution(a, sense);
      const double v = pu.value + w;
      Prefix& pv = best[j + 1][a.head];
      std::vector<double> cand = pu.labels;
      cand.push_back(lab);
      bool take;
      if (!pv.reachable) {
        take = true;
      } else if (std::abs(v - pv.value) <= tie_tol(std::max(std::abs(v), std::abs(pv.value)))) {
        take = cand < pv.labels;
      } else {
        take = better(v, pv.value, sense);
      }
      if (take) {
        pv.reachable = true;
        pv.value = v;
        pv.labels = std::move(cand);
      }
    }
  }
  return best;
}

Path optimal_path(const DecisionDiagram& dd, Sense sense) {
  if (dd.empty()) throw EmptyDiagram();
  auto best = optimal_prefixes(dd, sense);
  const Prefix& t = best.back().front();
  if (!t.reachable) throw EmptyDiagram();
  return Path{t.labels, t.value};
}

namespace {

template <class F>
void walk_paths(const DecisionDiagram& dd, std::size_t cap, F&& emit) {
  if (dd.empty()) return;
  const std::size_t m = dd.num_arc_layers();
  std::vector<std::vector<std::vector<std::size_t>>> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    out[j].resize(dd.layer_size(j));
    for (std::size_t k = 0; k < dd.arcs(j).size(); ++k) out[j][dd.arcs(j)[k].tail].push_back(k);
  }
  std::vector<double> labels;
  std::size_t count = 0;
  double weight = 0.0;
  auto rec = [&](auto&& self, std::size_t j, std::size_t u) -> void {
    if (j == m) {
      if (++count > cap) throw PathExplosion(cap);
      emit(labels, weight);
      return;
    }
    for (std::size_t k : out[j][u]) {
      const Arc& a = dd.arcs(j)[k];
      const int ends = a.label.interval && a.label.lo != a.label.hi ? 2 : 1;
      for (int e = 0; e < ends; ++e) {
        const double lab = e == 0 ? a.label.lo : a.label.hi;
        labels.push_back(lab);
        const double w = a.label.interval ? a.weight * lab : a.weight;
        weight += w;
        self(self, j + 1, a.head);
        weight -= w;
        labels.pop_back();
      }
    }
  };
  rec(rec, 0, 0);
}

}  // namespace

std::vector<std::vector<double>> enumerate_solutions(const DecisionDiagram& dd, std::size_t cap) {
  std::vector<std::vector<double>> sols;
  walk_paths(dd, cap, [&](const std::vector<double>& l, double) { sols.push_back(l); });
  return sols;
}

std::vector<Path> enumerate_paths(const DecisionDiagram& dd, std::size_t cap) {
  std::vector<Path> paths;
  walk_paths(dd, cap, [&](const std::vector<double>& l, double w) { paths.push_back(Path{l, w}); });
  return paths;
}

DecisionDiagram reduce_interval_arcs(const DecisionDiagram& dd, const std::set<std::size_t>& layers) {
  DecisionDiagram out = dd;
  for (std::size_t j : layers) {
    if (j >= dd.num_arc_layers()) throw std::out_of_range("reduce_interval_arcs: layer out of range");
    if (dd.kind(j) != LayerKind::Discrete) continue;
    const auto& arcs = dd.arcs(j);
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> ext;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      auto key = std::make_pair(arcs[k].tail, arcs[k].head);
      auto it = ext.find(key);
      if (it == ext.end()) {
        ext.emplace(key, std::make_pair(k, k));
        continue;
      }
      if (arcs[k].label.lo < arcs[it->second.first].label.lo) it->second.first = k;
      if (arcs[k].label.lo > arcs[it->second.second].label.lo) it->second.second = k;
    }
    std::vector<Arc> kept;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      const auto& e = ext.at({arcs[k].tail, arcs[k].head});
      if (k == e.first || k == e.second) kept.push_back(arcs[k]);
    }
    out.arcs_mut(j) = std::move(kept);
  }
  return out;
}

DecisionDiagram merge_nodes(const DecisionDiagram& dd, std::size_t node_layer,
                            const std::vector<std::size_t>& nodes, const StateMerge& state_merge) {
  if (node_layer == 0 || node_layer >= dd.num_arc_layers())
    throw std::invalid_argument("merge_nodes: only interior layers can be merged");
  if (nodes.empty()) return dd;
  std::vector<char> in_group(dd.layer_size(node_layer), 0);
  for (std::size_t v : nodes) in_group.at(v) = 1;
  const std::size_t target = *std::min_element(nodes.begin(), nodes.end());
  std::vector<std::size_t> remap(dd.layer_size(node_layer));
  std::size_t next = 0;
  for (std::size_t i = 0; i < remap.size(); ++i) {
    if (in_group[i] && i != target) continue;
    remap[i] = next++;
  }
  for (std::size_t i = 0; i < remap.size(); ++i)
    if (in_group[i]) remap[i] = remap[target];

  DecisionDiagram out = dd;
  std::vector<NodeState> states;
  for (std::size_t v : nodes) states.push_back(dd.node(node_layer, v).state);
  Node merged{true, state_merge ? state_merge(states) : dd.node(node_layer, target).state};
  std::vector<Node> layer;
  for (std::size_t i = 0; i < remap.size(); ++i) {
    if (in_group[i] && i != target) continue;
    layer.push_back(i == target ? merged : dd.node(node_layer, i));
  }
  out.layer_mut(node_layer) = std::move(layer);
  auto dedup = [](std::vector<Arc>& arcs) {
    std::vector<Arc> kept;
    for (const auto& a : arcs) {
      const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Arc& b) {
        return b.tail == a.tail && b.head == a.head && b.label == a.label && b.weight == a.weight;
      });
      if (!dup) kept.push_back(a);
    }
    arcs = std::move(kept);
  };
  for (auto& a : out.arcs_mut(node_layer - 1)) a.head = remap[a.head];
  for (auto& a : out.arcs_mut(node_layer)) a.tail = remap[a.tail];
  dedup(out.arcs_mut(node_layer - 1));
  dedup(out.arcs_mut(node_layer));
  return out;
}

DecisionDiagram merge_equivalent_nodes(const DecisionDiagram& dd) {
  DecisionDiagram out = dd;
  out.cleanup();
  if (out.empty()) return out;
  const std::size_t m = out.num_arc_layers();
  using Sig = std::vector<std::tuple<double, double, bool, double, std::size_t>>;
  for (std::size_t j = m; j-- > 1;) {
    std::vector<Sig> sig(out.layer_size(j));
    for (const auto& a : out.arcs(j)) sig[a.tail].emplace_back(a.label.lo, a.label.hi, a.label.interval, a.weight, a.head);
    for (auto& s : sig) std::sort(s.begin(), s.end());
    std::map<Sig, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < sig.size(); ++i) groups[sig[i]].push_back(i);
    std::vector<std::size_t> rep(sig.size());
    for (auto& [s, g] : groups)
      for (std::size_t i : g) rep[i] = g.front();
    // collapse: keep representatives in original order
    std::vector<std::size_t> remap(sig.size(), SIZE_MAX);
    std::vector<Node> layer;
    for (std::size_t i = 0; i < sig.size(); ++i) {
      if (rep[i] != i) continue;
      remap[i] = layer.size();
      layer.push_back(out.node(j, i));
    }
    for (std::size_t i = 0; i < sig.size(); ++i) {
      remap[i] = remap[rep[i]];
      if (rep[i] != i && out.node(j, i).merged) layer[remap[i]].merged = true;
    }
    out.layer_mut(j) = std::move(layer);
    std::vector<Arc> below;
    for (const auto& a : out.arcs(j)) {
      if (rep[a.tail] != a.tail) continue;
      Arc b = a;
      b.tail = remap[a.tail];
      below.push_back(b);
    }
    out.arcs_mut(j) = std::move(below);
    std::vector<Arc> above;
    for (const auto& a : out.arcs(j - 1)) {
      Arc b = a;
      b.head = remap[a.head];
      const bool dup = std::any_of(above.begin(), above.end(), [&](const Arc& c) {
        return c.tail == b.tail && c.head == b.head && c.label == b.label && c.weight == b.weight;
      });
      if (!dup) above.push_back(b);
    }
    out.arcs_mut(j - 1) = std::move(above);
  }
  return out;
}

DecisionDiagram append_continuous_layer(const DecisionDiagram& dd, double lo, double hi, double slope) {
  if (dd.has_continuous_layer()) throw std::invalid_argument("diagram already has a continuous layer");
  auto kinds = dd.kinds();
  kinds.push_back(LayerKind::Continuous);
  DecisionDiagram out(kinds);
  const std::size_t m = dd.num_arc_layers();
  out.node(0, 0) = dd.node(0, 0);
  for (std::size_t j = 1; j <= m; ++j)
    for (const auto& n : dd.layer(j)) out.add_node(j, n);
  for (std::size_t j = 0; j < m; ++j)
    for (const auto& a : dd.arcs(j)) out.add_arc(j, a);
  for (std::size_t i = 0; i < out.layer_size(m); ++i) out.add_arc(m, Arc{i, 0, Label::range(lo, hi), slope});
  out.cleanup();
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string state_text(const NodeState& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += s[i] >= kStateInfinity ? std::string("inf") : std::to_string(s[i]);
  }
  return out + ")";
}

}  // namespace

std::string to_dot(const DecisionDiagram& dd) {
  std::ostringstream os;
  os << "digraph DD {\n  rankdir=TB;\n";
  const std::size_t m = dd.num_arc_layers();
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i < dd.layer_size(j); ++i) {
      const Node& n = dd.node(j, i);
      std::string label = j == 0 ? "r" : (j == m ? "t" : std::to_string(j) + ":" + std::to_string(i));
      if (!n.state.empty()) label += " " + state_text(n.state);
      os << "  n" << j << "_" << i << " [label=\"" << label << "\"" << (n.merged ? ", shape=box" : "") << "];\n";
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& a : dd.arcs(j)) {
      const std::string lab = a.label.interval ? "[" + fmt(a.label.lo) + "," + fmt(a.label.hi) + "]" : fmt(a.label.lo);
      os << "  n" << j << "_" << a.tail << " -> n" << (j + 1) << "_" << a.head << " [label=\"" << lab
         << " w=" << fmt(a.weight) << "\"" << (!a.label.interval && a.label.lo == 0.0 ? ", style=dashed" : "")
         << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace ddbd::dd
