#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <spdlog/spdlog.h>

#include "ddbd/benders.hpp"

namespace ddbd::benders {

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kPrefixCap = 100000;

bool better(Sense s, double a, double b) {
  const double tol = 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
  return s == Sense::Max ? a > b + tol : a < b - tol;
}

bool ties(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b))); }

std::vector<std::vector<double>> all_prefixes(const dd::DecisionDiagram& d, std::size_t layer, std::size_t node) {
  std::vector<std::vector<std::vector<double>>> cur(d.layer_size(0));
  cur[0] = {{}};
  std::size_t total = 1;
  for (std::size_t j = 0; j < layer; ++j) {
    std::vector<std::vector<std::vector<double>>> next(d.layer_size(j + 1));
    total = 0;
    for (const auto& a : d.arcs(j)) {
      for (const auto& p : cur[a.tail]) {
        auto q = p;
        q.push_back(a.label.lo);
        next[a.head].push_back(std::move(q));
        if (++total > kPrefixCap) throw dd::PathExplosion(kPrefixCap);
      }
    }
    cur = std::move(next);
  }
  auto out = std::move(cur[node]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class Engine {
 public:
  Engine(const MasterOracle& m, const SubproblemOracle& s, const EngineConfig& c)
      : master_(m), sub_(s), cfg_(c), sense_(m.sense()), start_(Clock::now()) {
    if (cfg_.width == 0) throw std::invalid_argument("width must be at least 1");
    rep_.width_cap = cfg_.width;
  }

  SolveReport run() {
    std::vector<PartialAssignment> stack{{}};
    bool stopped = false;
    while (!stack.empty()) {
      if (timed_out()) {
        stopped = true;
        break;
      }
      PartialAssignment part = std::move(stack.back());
      stack.pop_back();
      ++rep_.nodes_explored;
      spdlog::debug("node {} partial length {}", rep_.nodes_explored, part.size());
      if (restricted_phase(part) && cfg_.skip_relaxed_when_exact) continue;
      if (timed_out()) {
        stopped = true;
        break;
      }
      relaxed_phase(part, stack);
    }
    if (timed_out() && !stack.empty()) stopped = true;
    rep_.status = stopped ? SolveStatus::TimeLimit : (have_incumbent_ ? SolveStatus::Optimal : SolveStatus::Infeasible);
    rep_.cuts = pool_.cuts();
    rep_.seconds = elapsed();
    return rep_;
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool timed_out() const { return elapsed() > cfg_.time_limit_seconds; }

  void snapshot(const char* tag, const dd::DecisionDiagram& d) {
    if (!cfg_.diagram_hook) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%05zu-%s", snapshots_++, tag);
    cfg_.diagram_hook(buf, d);
  }

  void grow_cap(const dd::DecisionDiagram& d) {
    const std::size_t w = d.width();
    if (w <= rep_.width_cap) return;
    while (rep_.width_cap < w) rep_.width_cap *= 2;
    spdlog::info("refinement exceeded the width cap; cap grown to {}", rep_.width_cap);
  }

  static bool converged(const SubproblemResult& r, double z) {
    return r.feasible && std::abs(z - r.value) <= kConvergenceTol;
  }

  // evaluates (x, z) and returns the cuts that were new to the pool; nothing
  // is pooled when z already matches the second-stage value
  std::vector<CutRow> evaluate(const std::vector<double>& x, double z, SubproblemResult& r) {
    r = sub_.evaluate(x);
    rep_.lp_calls += r.lp_calls;
    std::vector<CutRow> fresh;
    if (converged(r, z)) return fresh;
    for (const auto& c : r.cuts) {
      if (!pool_.add(c)) continue;
      (c.is_feasibility() ? rep_.feasibility_cuts : rep_.optimality_cuts) += 1;
      fresh.push_back(c);
    }
    return fresh;
  }

  bool refine(dd::DecisionDiagram& d, const std::vector<CutRow>& cuts) {
    try {
      d = apply_cuts(std::move(d), cuts);
    } catch (const dd::InfeasibleDiagram&) {
      return false;
    }
    grow_cap(d);
    return true;
  }

  void candidate(const std::vector<double>& x, double rho) {
    const double w = master_.master_cost(x) + rho;
    if (!have_incumbent_ || better(sense_, w, rep_.value) || (ties(w, rep_.value) && x < rep_.x)) {
      have_incumbent_ = true;
      rep_.value = w;
      rep_.x = x;
      rep_.z = rho;
      spdlog::debug("incumbent {}", w);
    }
  }

  static std::vector<double> x_of(const dd::Path& p) { return {p.assignment.begin(), p.assignment.end() - 1}; }

  // Returns true when the subtree under part is fully resolved.
  bool restricted_phase(const PartialAssignment& part) {
    BuiltDiagram b;
    try {
      b = master_.build_restricted(part, cfg_.width);
    } catch (const dd::EmptyDiagram&) {
      return true;
    }
    dd::DecisionDiagram d = std::move(b.dd);
    if (!refine(d, pool_.cuts())) return b.exact;
    snapshot("restricted", d);
    for (std::size_t it = 0; it < cfg_.max_repeat_iterations; ++it) {
      if (timed_out()) return false;
      const dd::Path p = dd::optimal_path(d, sense_);
      const auto x = x_of(p);
      const double z = p.assignment.back();
      SubproblemResult r;
      const auto fresh = evaluate(x, z, r);
      if (converged(r, z)) {
        candidate(x, r.value);
        if (cfg_.observer) cfg_.observer({BoundKind::Restricted, part, master_.master_cost(x) + r.value, x});
        return b.exact;
      }
      if (fresh.empty()) {
        spdlog::warn("restricted loop stalled without a new cut (z {} vs value {})", z, r.value);
        if (r.feasible) candidate(x, r.value);
        return false;
      }
      if (!refine(d, fresh)) return b.exact;
      snapshot("restricted", d);
    }
    return false;
  }

  void relaxed_phase(const PartialAssignment& part, std::vector<PartialAssignment>& stack) {
    BuiltDiagram b;
    try {
      b = master_.build_relaxed(part, cfg_.width);
    } catch (const dd::EmptyDiagram&) {
      return;
    }
    dd::DecisionDiagram d = std::move(b.dd);
    if (!refine(d, pool_.cuts())) return;
    snapshot("relaxed", d);
    dd::Path p = dd::optimal_path(d, sense_);
    if (cfg_.observer) cfg_.observer({BoundKind::Relaxed, part, p.value, x_of(p)});
    if (have_incumbent_ && !better(sense_, p.value, rep_.value)) return;
    if (cfg_.relaxed_cuts) {
      for (std::size_t it = 0; it < cfg_.relaxed_cut_cap; ++it) {
        if (timed_out()) return;
        SubproblemResult r;
        const auto fresh = evaluate(x_of(p), p.assignment.back(), r);
        if (converged(r, p.assignment.back())) break;
        if (fresh.empty()) break;
        if (!refine(d, fresh)) return;
        snapshot("relaxed", d);
        p = dd::optimal_path(d, sense_);
        if (cfg_.observer) cfg_.observer({BoundKind::Relaxed, part, p.value, x_of(p)});
        if (have_incumbent_ && !better(sense_, p.value, rep_.value)) return;
      }
    }
    branch(d, part, stack);
  }

  void branch(const dd::DecisionDiagram& d, const PartialAssignment& part, std::vector<PartialAssignment>& stack) {
    const std::size_t nx = master_.num_vars();
    const auto cs = exact_cutset(d);
    std::vector<std::pair<double, PartialAssignment>> children;
    const auto prefixes = dd::optimal_prefixes(d, sense_);
    if (cs.layer <= part.size()) {
      if (part.size() >= nx) return;
      // nothing exact below the fixed prefix: split on the next variable
      std::map<double, double> best;
      const auto& pre = prefixes[part.size()];
      for (const auto& a : d.arcs(part.size())) {
        if (!pre[a.tail].reachable) continue;
        const double v = pre[a.tail].value + dd::arc_contribution(a, sense_).first;
        auto [it, fresh] = best.emplace(a.label.lo, v);
        if (!fresh && better(sense_, v, it->second)) it->second = v;
      }
      for (auto [label, v] : best) {
        auto child = part;
        child.push_back(label);
        children.emplace_back(v, std::move(child));
      }
    } else {
      for (std::size_t u : cs.nodes) {
        const auto& pre = prefixes[cs.layer][u];
        if (!pre.reachable) continue;
        if (cfg_.branch_prefixes == BranchPrefixes::LongestOnly) {
          children.emplace_back(pre.value, pre.labels);
        } else {
          for (auto& q : all_prefixes(d, cs.layer, u)) children.emplace_back(pre.value, std::move(q));
        }
      }
    }
    std::stable_sort(children.begin(), children.end(), [&](const auto& a, const auto& b) {
      if (better(sense_, a.first, b.first)) return true;
      if (better(sense_, b.first, a.first)) return false;
      return a.second < b.second;
    });
    std::vector<PartialAssignment> uniq;
    for (auto& c : children)
      if (std::find(uniq.begin(), uniq.end(), c.second) == uniq.end()) uniq.push_back(std::move(c.second));
    rep_.branches += uniq.size();
    // best child on top of the stack
    for (auto it = uniq.rbegin(); it != uniq.rend(); ++it) stack.push_back(std::move(*it));
  }

  const MasterOracle& master_;
  const SubproblemOracle& sub_;
  const EngineConfig& cfg_;
  Sense sense_;
  Clock::time_point start_;
  CutPool pool_;
  SolveReport rep_;
  bool have_incumbent_ = false;
  std::size_t snapshots_ = 0;
};

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "?";
}

SolveReport dd_bd_solve(const MasterOracle& master, const SubproblemOracle& sub, const EngineConfig& config) {
  return Engine(master, sub, config).run();
}

}  // namespace ddbd::benders
