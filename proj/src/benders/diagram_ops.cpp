#include <algorithm>
#include <cmath>

#include "ddbd/benders.hpp"

namespace ddbd::benders {

namespace {
std::int64_t round_key(double v) { return std::llround(v * 1e9); }
}  // namespace

CutPool::Key CutPool::key_of(const CutRow& c) {
  std::vector<std::pair<std::size_t, std::int64_t>> coeffs;
  for (auto [j, v] : c.coeffs) {
    const auto k = round_key(v);
    if (k != 0) coeffs.emplace_back(j, k);
  }
  return {std::move(coeffs), round_key(c.z_coeff), round_key(c.rhs), c.sense == dd::CutSense::Le ? 0 : 1};
}

bool CutPool::add(const CutRow& cut) {
  if (!keys_.insert(key_of(cut)).second) return false;
  cuts_.push_back(cut);
  return true;
}

dd::DecisionDiagram apply_cuts(dd::DecisionDiagram d, const std::vector<CutRow>& cuts) {
  for (const auto& c : cuts) d = dd::refine_with_cut(d, c, dd::RefineMode::Exact);
  return d;
}

ExactCutset exact_cutset(const dd::DecisionDiagram& d) {
  ExactCutset out;
  // the terminal layer is never a branching candidate
  const std::size_t last = d.num_node_layers() >= 2 ? d.num_node_layers() - 2 : 0;
  for (std::size_t j = 0; j <= last; ++j) {
    const auto& layer = d.layer(j);
    if (std::any_of(layer.begin(), layer.end(), [](const dd::Node& n) { return n.merged; })) break;
    out.layer = j;
  }
  out.nodes.resize(d.layer_size(out.layer));
  for (std::size_t i = 0; i < out.nodes.size(); ++i) out.nodes[i] = i;
  return out;
}

double cost_tuple_reward(const dd::DecisionDiagram& d, const std::vector<CutRow>& cuts) {
  if (d.has_continuous_layer()) throw std::invalid_argument("cost_tuple_reward expects a diagram over x only");
  if (cuts.empty()) throw std::invalid_argument("cost_tuple_reward needs at least one cut");
  const std::size_t m = d.num_arc_layers();
  // alpha0 and alpha per cut, from  -alpha x + z <= alpha0  style rows
  std::vector<double> alpha0;
  std::vector<std::vector<double>> alpha;
  for (const auto& c : cuts) {
    const bool upper = (c.z_coeff > 0) == (c.sense == dd::CutSense::Le);
    if (c.is_feasibility() || !upper) throw std::invalid_argument("cost_tuple_reward takes cuts z <= alpha x + alpha0");
    std::vector<double> a(m, 0.0);
    for (auto [j, v] : c.coeffs) {
      if (j >= m) throw std::invalid_argument("cut references a missing layer");
      a[j] = -v / c.z_coeff;
    }
    alpha.push_back(std::move(a));
    alpha0.push_back(c.rhs / c.z_coeff);
  }
  for (std::size_t j = 1; j + 1 < d.num_node_layers(); ++j) {
    std::vector<int> indeg(d.layer_size(j), 0);
    for (const auto& a : d.arcs(j - 1)) ++indeg[a.head];
    for (int k : indeg)
      if (k != 1) throw PropertyViolation("node without a unique incoming arc at layer " + std::to_string(j));
  }
  {
    std::vector<int> out(d.layer_size(m - 1), 0);
    for (const auto& a : d.arcs(m - 1))
      if (++out[a.tail] > 1) throw PropertyViolation("node with several arcs into the terminal");
  }
  const std::size_t J = cuts.size();
  std::vector<std::vector<double>> r(d.layer_size(0), alpha0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    std::vector<std::vector<double>> next(d.layer_size(j + 1));
    for (const auto& a : d.arcs(j)) {
      auto& v = next[a.head];
      v.resize(J);
      for (std::size_t k = 0; k < J; ++k) v[k] = r[a.tail][k] + alpha[k][j] * a.label.lo;
    }
    r = std::move(next);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : d.arcs(m - 1)) {
    double acc = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < J; ++k) acc = std::min(acc, r[a.tail][k] + alpha[k][m - 1] * a.label.lo);
    best = std::max(best, acc);
  }
  if (best == -std::numeric_limits<double>::infinity()) throw dd::EmptyDiagram();
  return best;
}

CutRow normalize_cut(CutRow c) {
  for (auto it = c.coeffs.begin(); it != c.coeffs.end();)
    it = std::abs(it->second) < 1e-12 ? c.coeffs.erase(it) : std::next(it);
  double scale = 0.0;
  if (!c.is_feasibility()) {
    scale = std::abs(c.z_coeff);
  } else {
    for (auto [j, v] : c.coeffs) scale = std::max(scale, std::abs(v));
    if (scale < 1e-12) scale = std::abs(c.rhs);
  }
  if (scale < 1e-12) return c;
  for (auto& [j, v] : c.coeffs) v /= scale;
  c.z_coeff /= scale;
  c.rhs /= scale;
  return c;
}

}  // namespace ddbd::benders
