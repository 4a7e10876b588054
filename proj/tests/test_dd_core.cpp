#include <algorithm>
#include <random>

#include "ddbd/dd_json.hpp"
#include "ddbd/decision_diagram.hpp"
#include "doctest.h"
#include "support/random_dd.hpp"

using namespace ddbd::dd;
using Sols = std::vector<std::vector<double>>;

namespace {

Sols sorted(Sols s) {
  std::sort(s.begin(), s.end());
  return s;
}

// master of the small two-binary example: x1 + x2 >= 1, objective x1 + x2 + z
DecisionDiagram small_master(double big) {
  auto dd = DecisionDiagram::from_paths({{0, 1}, {1, 0}, {1, 1}});
  for (std::size_t j = 0; j < 2; ++j)
    for (auto& a : dd.arcs_mut(j)) a.weight = a.label.lo;
  return append_continuous_layer(dd, -big, big);
}

CutRow feas_cut() {
  CutRow c;
  c.coeffs = {{0, 2.0 / 3.0}, {1, 1.0}};
  c.rhs = 1.0;
  return c;
}

CutRow opt_cut() {
  CutRow c;
  c.coeffs = {{0, -2.0 / 3.0}};
  c.z_coeff = 1.0;
  c.rhs = 2.0;
  return c;
}

bool subset(const Sols& a, const Sols& b) {
  auto sb = sorted(b);
  for (const auto& s : a)
    if (!std::binary_search(sb.begin(), sb.end(), s)) return false;
  return true;
}

}  // namespace

TEST_CASE("refinement sequence of the two-binary example") {
  auto dd = small_master(100);
  auto p0 = optimal_path(dd, Sense::Max);
  CHECK(p0.assignment == std::vector<double>{1, 1, 100});
  auto b = refine_with_cut(dd, feas_cut(), RefineMode::Exact);
  auto xs = enumerate_solutions(b);
  for (const auto& s : xs) CHECK_FALSE((s[0] == 1 && s[1] == 1));
  auto p1 = optimal_path(b, Sense::Max);
  CHECK(p1.assignment == std::vector<double>{0, 1, 100});  // tie with (1,0) broken lexicographically
  auto c = refine_with_cut(b, opt_cut(), RefineMode::Exact);
  for (const auto& a : c.arcs(2)) {
    CHECK(a.label.hi <= 8.0 / 3.0 + 1e-12);
  }
  auto p2 = optimal_path(c, Sense::Max);
  CHECK(p2.assignment[0] == 1);
  CHECK(p2.assignment[1] == 0);
  CHECK(p2.assignment[2] == doctest::Approx(8.0 / 3.0));
  CHECK(p2.value == doctest::Approx(11.0 / 3.0));
}

TEST_CASE("single zero path") {
  auto dd = DecisionDiagram::from_paths({{0, 0}});
  auto p = optimal_path(dd, Sense::Max);
  CHECK(p.value == 0.0);
  CHECK(p.assignment == std::vector<double>{0, 0});
}

TEST_CASE("optimal_path matches enumeration on random diagrams") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> cd(-3, 3);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> coef(4);
    for (auto& c : coef) c = cd(rng);
    auto dd = ddbd::testing::random_dd(rng, 4, 8, 1, coef);
    if (dd.empty()) continue;
    for (Sense s : {Sense::Max, Sense::Min}) {
      auto paths = enumerate_paths(dd);
      double best = paths.front().value;
      for (const auto& p : paths) best = s == Sense::Max ? std::max(best, p.value) : std::min(best, p.value);
      auto opt = optimal_path(dd, s);
      CHECK(opt.value == doctest::Approx(best).epsilon(1e-12));
      // lexicographically smallest among optimal
      std::vector<double> lex;
      for (const auto& p : paths)
        if (std::abs(p.value - best) <= 1e-9 * (1 + std::abs(best)) && (lex.empty() || p.assignment < lex)) lex = p.assignment;
      CHECK(opt.assignment == lex);
    }
  }
}

TEST_CASE("empty diagrams") {
  DecisionDiagram dd(std::vector<LayerKind>(2, LayerKind::Discrete));
  CHECK(dd.empty());
  CHECK(enumerate_solutions(dd).empty());
  CHECK_THROWS_AS(optimal_path(dd, Sense::Max), EmptyDiagram);
  dd.cleanup();
  auto dot = to_dot(dd);
  CHECK(dot.find("n0_0") != std::string::npos);
  CHECK(dot.find("->") == std::string::npos);
  CHECK(dot.find("n1_") == std::string::npos);
}

TEST_CASE("from_paths round trips") {
  Sols paths{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  CHECK(sorted(enumerate_solutions(DecisionDiagram::from_paths(paths))) == paths);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    Sols ps;
    for (int i = 0; i < 6; ++i) ps.push_back({double(rng() % 3), double(rng() % 2), double(rng() % 3)});
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    auto dd = DecisionDiagram::from_paths(ps);
    CHECK(sorted(enumerate_solutions(dd)) == ps);
    CHECK(sorted(enumerate_solutions(merge_equivalent_nodes(dd))) == ps);
  }
}

TEST_CASE("interval arcs enumerate both endpoints") {
  auto dd = small_master(5);
  auto sols = enumerate_solutions(dd);
  CHECK(sols.size() == 6);
  CHECK_THROWS_AS(enumerate_solutions(dd, 3), PathExplosion);
}

TEST_CASE("reduce_interval_arcs keeps min and max labels") {
  DecisionDiagram dd(std::vector<LayerKind>(1, LayerKind::Discrete));
  for (double l : {0.0, 0.5, 1.0}) dd.add_arc(0, Arc{0, 0, Label::point(l), l});
  auto r = reduce_interval_arcs(dd, {0});
  REQUIRE(r.arcs(0).size() == 2);
  CHECK(r.arcs(0)[0].label.lo == 0.0);
  CHECK(r.arcs(0)[1].label.lo == 1.0);
}

TEST_CASE("reduce_interval_arcs leaves a diagram without parallel arcs unchanged") {
  auto d1 = merge_equivalent_nodes(DecisionDiagram::from_paths({{0, 0}, {0, 2}, {1, 2}, {2, 0}, {2, 1}}));
  auto r = reduce_interval_arcs(d1, {0, 1});
  CHECK(to_json(r) == to_json(d1));
}

TEST_CASE("reduce_interval_arcs preserves linear optima") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> cd(-2, 2);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> coef(4);
    for (auto& c : coef) c = cd(rng);
    auto dd = ddbd::testing::random_dd(rng, 4, 5, 4, coef);
    if (dd.empty()) continue;
    auto r = reduce_interval_arcs(dd, {0, 1, 2, 3});
    for (Sense s : {Sense::Max, Sense::Min})
      CHECK(optimal_path(r, s).value == doctest::Approx(optimal_path(dd, s).value).epsilon(1e-9));
  }
}

TEST_CASE("vacuous cut leaves the diagram unchanged") {
  auto dd = small_master(10);
  CutRow c;
  c.rhs = 1.0;
  for (auto mode : {RefineMode::Exact, RefineMode::Relaxed})
    CHECK(sorted(enumerate_solutions(refine_with_cut(dd, c, mode))) == sorted(enumerate_solutions(dd)));
  c.rhs = -1.0;
  CHECK_THROWS_AS(refine_with_cut(dd, c, RefineMode::Exact), InfeasibleDiagram);
}

TEST_CASE("exact refinement soundness and relaxed sandwich") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> cd(-2, 2);
  std::uniform_int_distribution<int> ic(-3, 3);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    std::vector<double> coef(4);
    for (auto& c : coef) c = cd(rng);
    auto base = ddbd::testing::random_dd(rng, 4, 4, 2, coef);
    if (base.empty() || enumerate_solutions(base).size() > 200) continue;
    const bool with_z = k % 2 == 0;
    auto dd = with_z ? append_continuous_layer(base, -10, 10) : base;
    CutRow cut;
    for (std::size_t j = 0; j < 4; ++j)
      if (rng() % 3) cut.coeffs[j] = ic(rng);
    cut.sense = rng() % 2 ? CutSense::Le : CutSense::Ge;
    cut.rhs = ic(rng);
    if (with_z) cut.z_coeff = rng() % 2 ? 1.0 : -1.0;
    const auto all = enumerate_solutions(dd);
    Sols expected;
    if (!with_z) {
      for (const auto& s : all)
        if (cut.satisfied_by(s)) expected.push_back(s);
    }
    Sols exact, relaxed;
    try {
      exact = enumerate_solutions(refine_with_cut(dd, cut, RefineMode::Exact));
    } catch (const InfeasibleDiagram&) {
    }
    try {
      relaxed = enumerate_solutions(refine_with_cut(dd, cut, RefineMode::Relaxed));
    } catch (const InfeasibleDiagram&) {
    }
    if (!with_z) {
      CHECK(sorted(exact) == sorted(expected));
    } else {
      // every surviving endpoint satisfies the cut; every x-part keeps its z range clipped
      for (const auto& s : exact) CHECK(cut.satisfied_by({s.begin(), s.end() - 1}, s.back()));
      for (const auto& s : all) {
        std::vector<double> x(s.begin(), s.end() - 1);
        const double lhs = cut.lhs_x(x);
        const double zb = (cut.rhs - lhs) / cut.z_coeff;
        const bool above = (cut.z_coeff > 0) == (cut.sense == CutSense::Le);
        const bool feasible = above ? zb >= -10 - 1e-7 : zb <= 10 + 1e-7;
        const bool present = std::any_of(exact.begin(), exact.end(), [&](const auto& e) {
          return std::equal(x.begin(), x.end(), e.begin());
        });
        CHECK(present == feasible);
      }
    }
    if (with_z) {
      // sandwich on the projected x-parts
      auto proj = [](const Sols& s) {
        Sols p;
        for (const auto& v : s) p.emplace_back(v.begin(), v.end() - 1);
        return p;
      };
      CHECK(subset(proj(exact), proj(relaxed)));
      CHECK(subset(proj(relaxed), proj(all)));
    } else {
      CHECK(subset(exact, relaxed));
      CHECK(subset(relaxed, all));
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("merge_nodes keeps every path") {
  auto dd = DecisionDiagram::from_paths({{0, 0}, {1, 1}});
  REQUIRE(dd.layer_size(1) == 2);
  auto m = merge_nodes(dd, 1, {0, 1}, nullptr);
  CHECK(m.layer_size(1) == 1);
  CHECK(m.node(1, 0).merged);
  CHECK(subset(enumerate_solutions(dd), enumerate_solutions(m)));
  CHECK(enumerate_solutions(m).size() == 4);
}

TEST_CASE("merge_nodes applies the state combiner") {
  DecisionDiagram dd(std::vector<LayerKind>(2, LayerKind::Discrete));
  dd.add_node(1, Node{false, {3, 1, 1}});
  dd.add_node(1, Node{false, {2, 1, 1}});
  dd.add_arc(0, Arc{0, 0, Label::point(0), 0});
  dd.add_arc(0, Arc{0, 1, Label::point(1), 0});
  dd.add_arc(1, Arc{0, 0, Label::point(0), 0});
  dd.add_arc(1, Arc{1, 0, Label::point(1), 0});
  auto combine = [](const std::vector<NodeState>& s) {
    NodeState r = s.front();
    for (const auto& t : s) r = {std::max(r[0], t[0]), std::max(r[1], t[1]), std::min(r[2], t[2])};
    return r;
  };
  auto m = merge_nodes(dd, 1, {0, 1}, combine);
  CHECK(m.node(1, 0).state == NodeState{3, 1, 1});
}

TEST_CASE("to_dot is deterministic and lists nodes") {
  auto dd = small_master(3);
  CHECK(to_dot(dd) == to_dot(dd));
  CHECK(to_dot(dd).find("[0,") == std::string::npos);
  CHECK(to_dot(dd).find("[-3,3]") != std::string::npos);
}

TEST_CASE("json round trip") {
  auto dd = small_master(7);
  dd.node(1, 0).state = {1, kStateInfinity};
  auto j = to_json(dd);
  auto back = from_json(j);
  CHECK(to_json(back) == j);
  CHECK(j["layers"][1]["nodes"][0]["state"][1] == "inf");
  CutRow c = opt_cut();
  CHECK(cut_to_json(cut_from_json(cut_to_json(c))) == cut_to_json(c));
}
