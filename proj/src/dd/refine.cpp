#include <algorithm>
#include <cmath>
#include <limits>

#include "ddbd/decision_diagram.hpp"

namespace ddbd::dd {

namespace {

std::int64_t lhs_key(double v) { return std::llround(v * kLhsKeyScale); }

bool violates(double lhs, const CutRow& cut) {
  return cut.sense == CutSense::Le ? lhs > cut.rhs + kCutTol : lhs < cut.rhs - kCutTol;
}

// Whether the cut bounds z from above once the x part is known.
bool bounds_z_above(const CutRow& cut) {
  return (cut.z_coeff > 0) == (cut.sense == CutSense::Le);
}

Label tighten(Label lab, const CutRow& cut, double zbound) {
  if (bounds_z_above(cut)) lab.hi = std::min(lab.hi, zbound);
  else lab.lo = std::max(lab.lo, zbound);
  return lab;
}

bool label_empty(Label& lab) {
  if (lab.lo <= lab.hi) return false;
  if (lab.lo <= lab.hi + kCutTol) {
    lab.lo = lab.hi;  // snap a hairline interval
    return false;
  }
  return true;
}

void check_cut(const DecisionDiagram& dd, const CutRow& cut) {
  const std::size_t nx = dd.num_discrete_layers();
  for (auto [j, c] : cut.coeffs)
    if (j >= nx && c != 0.0) throw std::invalid_argument("cut references a layer the diagram lacks");
  if (!cut.is_feasibility() && !dd.has_continuous_layer())
    throw std::invalid_argument("optimality cut needs a continuous z layer");
}

double coeff_at(const CutRow& cut, std::size_t j) {
  auto it = cut.coeffs.find(j);
  return it == cut.coeffs.end() ? 0.0 : it->second;
}

DecisionDiagram refine_exact(const DecisionDiagram& dd, const CutRow& cut) {
  const std::size_t m = dd.num_arc_layers();
  const std::size_t nx = dd.num_discrete_layers();
  const bool feas = cut.is_feasibility();
  std::size_t last = 0;  // one past the last layer with a nonzero coefficient
  for (auto [j, c] : cut.coeffs)
    if (c != 0.0) last = std::max(last, j + 1);
  if (feas && last == 0) {
    if (violates(0.0, cut)) throw InfeasibleDiagram();
    return dd;
  }
  const std::size_t split_until = feas ? last : nx;

  DecisionDiagram out(dd.kinds());
  // per node layer: (old node, lhs key) -> new node, and the lhs value of each new node
  std::vector<std::size_t> origin{0};
  std::vector<double> lhs{0.0};
  for (std::size_t j = 0; j < m; ++j) {
    const bool to_terminal = j + 1 == m;
    std::map<std::pair<std::size_t, std::int64_t>, std::size_t> index;
    std::vector<std::size_t> next_origin;
    std::vector<double> next_lhs;
    if (to_terminal) {
      next_origin.push_back(0);
      next_lhs.push_back(0.0);
    }
    // group old arcs by tail for fast lookup
    std::vector<std::vector<const Arc*>> by_tail(dd.layer_size(j));
    for (const auto& a : dd.arcs(j)) by_tail[a.tail].push_back(&a);
    const double c = coeff_at(cut, j);
    for (std::size_t u = 0; u < origin.size(); ++u) {
      for (const Arc* a : by_tail[origin[u]]) {
        Arc na = *a;
        na.tail = u;
        double l = lhs[u];
        if (dd.kind(j) == LayerKind::Continuous) {
          if (!feas) {
            na.label = tighten(na.label, cut, (cut.rhs - l) / cut.z_coeff);
            if (label_empty(na.label)) continue;
          }
        } else {
          l += c * a->label.lo;
          if (feas && j + 1 == split_until && violates(l, cut)) continue;
        }
        if (to_terminal) {
          na.head = 0;
          out.add_arc(j, na);
          continue;
        }
        const std::int64_t key = j + 1 < split_until ? lhs_key(l) : (feas ? 0 : lhs_key(l));
        auto [it, fresh] = index.emplace(std::make_pair(a->head, key), next_origin.size());
        if (fresh) {
          next_origin.push_back(a->head);
          next_lhs.push_back(feas && j + 1 >= split_until ? 0.0 : l);
          out.add_node(j + 1, dd.node(j + 1, a->head));
        }
        na.head = it->second;
        out.add_arc(j, na);
      }
    }
    origin = std::move(next_origin);
    lhs = std::move(next_lhs);
  }
  out.cleanup();
  if (out.empty()) throw InfeasibleDiagram();
  return out;
}

DecisionDiagram refine_relaxed(const DecisionDiagram& dd, const CutRow& cut) {
  const std::size_t m = dd.num_arc_layers();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> pmin(m + 1), pmax(m + 1), smin(m + 1), smax(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    pmin[j].assign(dd.layer_size(j), inf);
    pmax[j].assign(dd.layer_size(j), -inf);
    smin[j].assign(dd.layer_size(j), inf);
    smax[j].assign(dd.layer_size(j), -inf);
  }
  pmin[0][0] = pmax[0][0] = 0.0;
  auto contrib = [&](std::size_t j, const Arc& a) {
    return dd.kind(j) == LayerKind::Continuous ? 0.0 : coeff_at(cut, j) * a.label.lo;
  };
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& a : dd.arcs(j)) {
      if (pmin[j][a.tail] == inf) continue;
      const double c = contrib(j, a);
      pmin[j + 1][a.head] = std::min(pmin[j + 1][a.head], pmin[j][a.tail] + c);
      pmax[j + 1][a.head] = std::max(pmax[j + 1][a.head], pmax[j][a.tail] + c);
    }
  }
  smin[m][0] = smax[m][0] = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    for (const auto& a : dd.arcs(j)) {
      if (smin[j + 1][a.head] == inf) continue;
      const double c = contrib(j, a);
      smin[j][a.tail] = std::min(smin[j][a.tail], smin[j + 1][a.head] + c);
      smax[j][a.tail] = std::max(smax[j][a.tail], smax[j + 1][a.head] + c);
    }
  }
  DecisionDiagram out = dd;
  const bool feas = cut.is_feasibility();
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Arc> kept;
    for (const auto& a : dd.arcs(j)) {
      if (pmin[j][a.tail] == inf || smin[j + 1][a.head] == inf) continue;
      if (dd.kind(j) == LayerKind::Continuous) {
        Arc na = a;
        if (!feas) {
          const double b1 = (cut.rhs - pmin[j][a.tail]) / cut.z_coeff;
          const double b2 = (cut.rhs - pmax[j][a.tail]) / cut.z_coeff;
          const double loosest = bounds_z_above(cut) ? std::max(b1, b2) : std::min(b1, b2);
          na.label = tighten(na.label, cut, loosest);
          if (label_empty(na.label)) continue;
        }
        kept.push_back(na);
        continue;
      }
      if (feas) {
        const double c = contrib(j, a);
        const double lo = pmin[j][a.tail] + c + smin[j + 1][a.head];
        const double hi = pmax[j][a.tail] + c + smax[j + 1][a.head];
        if (cut.sense == CutSense::Le ? violates(lo, cut) : violates(hi, cut)) continue;
      }
      kept.push_back(a);
    }
    out.arcs_mut(j) = std::move(kept);
  }
  out.cleanup();
  if (out.empty()) throw InfeasibleDiagram();
  return out;
}

}  // namespace

DecisionDiagram refine_with_cut(const DecisionDiagram& dd, const CutRow& cut, RefineMode mode) {
  if (dd.empty()) throw InfeasibleDiagram();
  check_cut(dd, cut);
  return mode == RefineMode::Exact ? refine_exact(dd, cut) : refine_relaxed(dd, cut);
}

}  // namespace ddbd::dd
