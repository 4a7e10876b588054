#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "ddbd/ucp.hpp"

namespace ddbd::ucp {

namespace {

enum class Mode { Exact, Restricted, Relaxed };

std::int64_t inc(std::int64_t s) { return s >= kInfPeriods ? kInfPeriods : s + 1; }

dd::NodeState encode(const MasterState& s, bool relaxed) {
  if (relaxed) return {s.s_plus, s.s_minus, s.s_eq};
  return {s.s_plus, s.s_minus};
}

auto tie(const MasterState& s) { return std::make_tuple(s.s_plus, s.s_minus, s.s_eq); }

struct Head {
  MasterState st;
  bool merged = false;
  double dist = 0.0;
};

struct PendingArc {
  std::size_t tail;
  std::size_t head;
  double label;
  double weight;
};

void check_partial(const Instance& inst, const PartialAssignment& partial) {
  if (partial.size() > inst.num_vars()) throw std::invalid_argument("partial assignment longer than the schedule");
  for (double v : partial)
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("partial assignment must be binary");
}

benders::BuiltDiagram compile(const Instance& inst, const PartialAssignment& partial, const GammaBounds& g, Mode mode,
                              std::size_t width) {
  check_partial(inst, partial);
  if (mode != Mode::Exact && width == 0) throw std::invalid_argument("width must be at least 1");
  const bool relaxed = mode == Mode::Relaxed;
  const std::size_t nT = inst.num_vars();
  const std::size_t T = static_cast<std::size_t>(inst.T);
  std::vector<dd::LayerKind> kinds(nT, dd::LayerKind::Discrete);
  kinds.push_back(dd::LayerKind::Continuous);
  dd::DecisionDiagram d(kinds);
  const MasterState root{};
  d.node(0, 0).state = encode(root, relaxed);
  bool exact = true;

  std::vector<Head> cur{{root, false, 0.0}};
  for (std::size_t k = 0; k < nT; ++k) {
    const auto& gen = inst.generators[k / T];
    const bool boundary = (k + 1) % T == 0 && k + 1 < nT;
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::size_t> index;
    std::vector<Head> next;
    std::vector<PendingArc> arcs;
    for (std::size_t u = 0; u < cur.size(); ++u) {
      const MasterState& s = cur[u].st;
      auto emit = [&](double label, double weight, MasterState to) {
        if (k < partial.size() && partial[k] != label) return;
        if (boundary) to = root;
        auto [it, fresh] = index.emplace(tie(to), next.size());
        if (fresh) next.push_back({to, false, cur[u].dist + weight});
        auto& h = next[it->second];
        h.dist = std::min(h.dist, cur[u].dist + weight);
        arcs.push_back({u, it->second, label, weight});
      };
      const MasterState stay{inc(s.s_plus), inc(s.s_minus), inc(s.s_eq)};
      if (s.down()) {
        emit(0.0, 0.0, stay);
        if (s.s_minus >= gen.l)
          emit(1.0, gen.c_f + gen.startup_cost(relaxed ? s.s_eq : s.s_minus), {1, inc(s.s_minus), inc(s.s_eq)});
      } else {
        emit(1.0, gen.c_f, stay);
        if (s.s_plus >= gen.L) emit(0.0, 0.0, {inc(s.s_plus), 1, 1});
      }
    }

    // best-first order by shortest distance from the root, ties by state
    std::vector<std::size_t> order(next.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (next[a].dist != next[b].dist) return next[a].dist < next[b].dist;
      return tie(next[a].st) < tie(next[b].st);
    });
    std::vector<std::size_t> remap(next.size(), SIZE_MAX);
    std::vector<Head> layer;
    if (mode == Mode::Exact || next.size() <= width) {
      for (std::size_t v : order) {
        remap[v] = layer.size();
        layer.push_back(next[v]);
      }
    } else if (mode == Mode::Restricted) {
      exact = false;
      for (std::size_t r = 0; r < width; ++r) {
        remap[order[r]] = layer.size();
        layer.push_back(next[order[r]]);
      }
    } else {
      // keep the best nodes as they are and fold the rest into one node per up/down group
      auto groups_in = [&](std::size_t from) {
        bool up = false, down = false;
        for (std::size_t r = from; r < order.size(); ++r) (next[order[r]].st.down() ? down : up) = true;
        return static_cast<std::size_t>(up) + static_cast<std::size_t>(down);
      };
      std::size_t keep = std::min(width, order.size());
      while (keep > 0 && keep + groups_in(keep) > width) --keep;
      for (std::size_t r = 0; r < keep; ++r) {
        remap[order[r]] = layer.size();
        layer.push_back(next[order[r]]);
      }
      for (bool down_group : {true, false}) {
        std::vector<std::size_t> members;
        for (std::size_t r = keep; r < order.size(); ++r)
          if (next[order[r]].st.down() == down_group) members.push_back(order[r]);
        if (members.empty()) continue;
        Head h = next[members.front()];
        if (members.size() > 1) {
          exact = false;
          std::vector<MasterState> states;
          for (std::size_t v : members) {
            states.push_back(next[v].st);
            h.dist = std::min(h.dist, next[v].dist);
          }
          h.st = merge_states(states);
          h.merged = true;
        }
        for (std::size_t v : members) remap[v] = layer.size();
        layer.push_back(h);
      }
    }
    for (const auto& h : layer) d.add_node(k + 1, dd::Node{h.merged, encode(h.st, relaxed)});
    for (const auto& a : arcs) {
      if (remap[a.head] == SIZE_MAX) continue;
      d.add_arc(k, dd::Arc{a.tail, remap[a.head], dd::Label::point(a.label), a.weight});
    }
    cur = std::move(layer);
  }
  for (std::size_t u = 0; u < cur.size(); ++u) d.add_arc(nT, dd::Arc{u, 0, dd::Label::range(g.lo, g.hi), 1.0});
  d.cleanup();
  if (d.empty()) throw dd::EmptyDiagram();
  return {std::move(d), exact};
}

}  // namespace

MasterState merge_states(const std::vector<MasterState>& states) {
  if (states.empty()) throw std::invalid_argument("nothing to merge");
  MasterState out = states.front();
  for (const auto& s : states) {
    out.s_plus = std::max(out.s_plus, s.s_plus);
    out.s_minus = std::max(out.s_minus, s.s_minus);
    out.s_eq = std::min(out.s_eq, s.s_eq);
  }
  return out;
}

dd::DecisionDiagram build_master_dd(const Instance& inst, const PartialAssignment& partial, const GammaBounds& g) {
  return compile(inst, partial, g, Mode::Exact, 0).dd;
}

benders::BuiltDiagram build_restricted_master_dd(const Instance& inst, const PartialAssignment& partial,
                                                 const GammaBounds& g, std::size_t width) {
  return compile(inst, partial, g, Mode::Restricted, width);
}

benders::BuiltDiagram build_relaxed_master_dd(const Instance& inst, const PartialAssignment& partial,
                                              const GammaBounds& g, std::size_t width) {
  return compile(inst, partial, g, Mode::Relaxed, width);
}

bool commitment_feasible(const Instance& inst, const std::vector<double>& x) {
  if (x.size() != inst.num_vars()) throw std::invalid_argument("schedule length mismatch");
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const auto& g = inst.generators[i];
    std::vector<int> xs(inst.T + 1, 0), y(inst.T + 1, 0), yb(inst.T + 1, 0);
    for (int j = 1; j <= inst.T; ++j) {
      const double v = x[inst.var(i, j)];
      if (v != 0.0 && v != 1.0) return false;
      xs[j] = static_cast<int>(v);
      y[j] = std::max(0, xs[j] - xs[j - 1]);
      yb[j] = std::max(0, xs[j - 1] - xs[j]);
    }
    for (int j = 1; j <= inst.T; ++j) {
      int ups = 0, downs = 0;
      for (int h = std::max(1, j - g.L + 1); h <= j; ++h) ups += y[h];
      for (int h = std::max(1, j - g.l + 1); h <= j; ++h) downs += yb[h];
      if (ups > xs[j] || downs > 1 - xs[j]) return false;
    }
  }
  return true;
}

double master_objective(const Instance& inst, const std::vector<double>& x) {
  if (x.size() != inst.num_vars()) throw std::invalid_argument("schedule length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const auto& g = inst.generators[i];
    int last_on = 0;  // 0: never committed so far
    double prev = 0.0;
    for (int j = 1; j <= inst.T; ++j) {
      const double v = x[inst.var(i, j)];
      if (v == 1.0) {
        total += g.c_f;
        if (prev == 0.0) total += last_on == 0 ? g.K_inf : g.startup_cost(j - 1 - last_on);
        last_on = j;
      }
      prev = v;
    }
  }
  return total;
}

}  // namespace ddbd::ucp
