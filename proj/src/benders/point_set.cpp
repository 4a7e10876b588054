#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddbd/benders.hpp"

namespace ddbd::benders {

namespace {

// node order best-first by prefix value, ties by prefix labels
std::vector<std::size_t> ranked(const dd::DecisionDiagram& d, std::size_t layer, Sense sense) {
  const auto pre = dd::optimal_prefixes(d, sense);
  std::vector<std::size_t> idx(d.layer_size(layer));
  std::iota(idx.begin(), idx.end(), 0);
  const auto& p = pre[layer];
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (p[a].value != p[b].value) return sense == Sense::Max ? p[a].value > p[b].value : p[a].value < p[b].value;
    return p[a].labels < p[b].labels;
  });
  return idx;
}

}  // namespace

PointSetMaster::PointSetMaster(Sense sense, std::vector<double> objective, std::vector<std::vector<double>> points,
                               double z_lo, double z_hi)
    : sense_(sense), objective_(std::move(objective)), points_(std::move(points)), z_lo_(z_lo), z_hi_(z_hi) {
  if (objective_.empty()) throw std::invalid_argument("master needs at least one variable");
  for (const auto& p : points_)
    if (p.size() != objective_.size()) throw std::invalid_argument("point dimension differs from objective");
  if (!(z_lo_ <= z_hi_) || !std::isfinite(z_lo_) || !std::isfinite(z_hi_))
    throw std::invalid_argument("z bounds must be finite with lo <= hi");
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

BuiltDiagram PointSetMaster::build_exact(const PartialAssignment& partial) const {
  if (partial.size() > objective_.size()) throw std::invalid_argument("partial assignment too long");
  std::vector<std::vector<double>> kept;
  for (const auto& p : points_)
    if (std::equal(partial.begin(), partial.end(), p.begin(),
                   [](double a, double b) { return std::abs(a - b) <= 1e-9; }))
      kept.push_back(p);
  if (kept.empty()) throw dd::EmptyDiagram();
  auto d = dd::DecisionDiagram::from_paths(kept);
  for (std::size_t j = 0; j < d.num_arc_layers(); ++j)
    for (auto& a : d.arcs_mut(j)) a.weight = objective_[j] * a.label.lo;
  d = dd::append_continuous_layer(d, z_lo_, z_hi_);
  return {dd::merge_equivalent_nodes(d), true};
}

BuiltDiagram PointSetMaster::build_restricted(const PartialAssignment& partial, std::size_t width) const {
  if (width == 0) throw std::invalid_argument("width must be at least 1");
  BuiltDiagram b = build_exact(partial);
  auto& d = b.dd;
  for (std::size_t j = 1; j + 1 < d.num_node_layers(); ++j) {
    if (d.layer_size(j) <= width) continue;
    b.exact = false;
    const auto order = ranked(d, j, sense_);
    std::vector<char> keep(d.layer_size(j), 0);
    for (std::size_t k = 0; k < width; ++k) keep[order[k]] = 1;
    auto& in = d.arcs_mut(j - 1);
    in.erase(std::remove_if(in.begin(), in.end(), [&](const dd::Arc& a) { return !keep[a.head]; }), in.end());
    d.cleanup();
  }
  return b;
}

BuiltDiagram PointSetMaster::build_relaxed(const PartialAssignment& partial, std::size_t width) const {
  if (width == 0) throw std::invalid_argument("width must be at least 1");
  BuiltDiagram b = build_exact(partial);
  auto& d = b.dd;
  for (std::size_t j = 1; j + 1 < d.num_node_layers(); ++j) {
    if (d.layer_size(j) <= width) continue;
    b.exact = false;
    const auto order = ranked(d, j, sense_);
    std::vector<std::size_t> group(order.begin() + static_cast<std::ptrdiff_t>(width - 1), order.end());
    d = dd::merge_nodes(d, j, group, nullptr);
  }
  return b;
}

double PointSetMaster::master_cost(const std::vector<double>& x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < objective_.size(); ++j) s += objective_[j] * x.at(j);
  return s;
}

}  // namespace ddbd::benders
