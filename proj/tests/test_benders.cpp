#include <chrono>
#include <random>

#include "ddbd/benders.hpp"
#include "doctest.h"
#include "support/two_binary.hpp"

using namespace ddbd;
using namespace ddbd::benders;
using dd::CutSense;

namespace {

struct Truth {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> x;
};

// enumerate the points and solve each second stage directly
Truth enumerate(const PointSetMaster& m, const LinearSubproblem& s) {
  Truth t;
  for (const auto& x : m.points()) {
    const auto out = lp::solve(s.primal(x));
    const auto* opt = std::get_if<lp::Optimal>(&out);
    if (!opt) continue;
    const double v = m.master_cost(x) + opt->objective;
    const bool improves = m.sense() == Sense::Max ? v > t.value + 1e-9 : v < t.value - 1e-9;
    if (!t.feasible || improves) t = {true, v, x};
  }
  return t;
}

struct RandomTwoStage {
  PointSetMaster master;
  LinearSubproblem sub;
};

RandomTwoStage random_two_stage(std::mt19937_64& rng, Sense sense) {
  const std::size_t nx = 2 + rng() % 3, ny = 2 + rng() % 2;
  std::uniform_real_distribution<double> u01(0, 1);
  auto r2 = [&](double lo, double hi) { return std::round((lo + (hi - lo) * u01(rng)) * 4) / 4; };
  std::vector<std::vector<double>> pts;
  for (std::size_t mask = 0; mask < (1u << nx); ++mask) {
    if (u01(rng) < 0.35) continue;
    std::vector<double> p(nx);
    for (std::size_t j = 0; j < nx; ++j) p[j] = (mask >> j) & 1;
    pts.push_back(p);
  }
  if (pts.empty()) pts.push_back(std::vector<double>(nx, 1.0));
  std::vector<double> c(nx);
  for (auto& v : c) v = r2(-3, 3);
  TwoStageLinear m;
  m.sense = sense;
  for (std::size_t k = 0; k < ny; ++k) m.q.push_back(r2(0.5, 4));
  // capacity rows keep the max problem bounded; demand rows make some x infeasible
  for (int r = 0; r < 2; ++r) {
    TwoStageRow row;
    for (std::size_t k = 0; k < ny; ++k) row.w.push_back(r2(0.25, 2));
    for (std::size_t j = 0; j < nx; ++j) row.t.push_back(-r2(0, 3));
    row.sense = lp::RowSense::Le;
    row.h = r2(0, 2);
    m.rows.push_back(row);
  }
  TwoStageRow dem;
  for (std::size_t k = 0; k < ny; ++k) dem.w.push_back(r2(0.25, 2));
  for (std::size_t j = 0; j < nx; ++j) dem.t.push_back(r2(-1, 1));
  dem.sense = lp::RowSense::Ge;
  dem.h = r2(0, 3);
  m.rows.push_back(dem);
  return {PointSetMaster(sense, c, pts, -200, 200), LinearSubproblem(m)};
}

}  // namespace

TEST_CASE("two-binary example end to end") {
  const auto master = two_binary_master();
  const LinearSubproblem sub(two_binary_second_stage());
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = dd_bd_solve(master, sub, EngineConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 0.1);
  REQUIRE(rep.status == SolveStatus::Optimal);
  CHECK(rep.value == doctest::Approx(11.0 / 3.0).epsilon(1e-9));
  CHECK(rep.x == std::vector<double>{1, 0});
  CHECK(rep.z == doctest::Approx(8.0 / 3.0).epsilon(1e-9));
  CHECK(rep.feasibility_cuts == 1);
  CHECK(rep.optimality_cuts == 1);
  REQUIRE(rep.cuts.size() == 2);
  const auto& f = rep.cuts[0];
  CHECK(f.is_feasibility());
  CHECK(f.sense == CutSense::Le);
  CHECK(f.coeffs.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(f.coeffs.at(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.rhs == doctest::Approx(1.0).epsilon(1e-6));
  const auto& o = rep.cuts[1];
  // z <= (2/3) x1 + 2 stored as -(2/3) x1 + z <= 2
  CHECK(o.z_coeff == doctest::Approx(1.0));
  CHECK(o.sense == CutSense::Le);
  CHECK(o.coeffs.at(0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-6));
  CHECK(o.coeffs.count(1) == 0);
  CHECK(o.rhs == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("second-stage cuts of the two-binary example") {
  const LinearSubproblem sub(two_binary_second_stage());
  auto infeasible = sub.evaluate({1, 1});
  CHECK_FALSE(infeasible.feasible);
  REQUIRE(infeasible.cuts.size() == 1);
  CHECK(infeasible.cuts[0].coeffs.at(0) == doctest::Approx(2.0 / 3.0));
  auto ok = sub.evaluate({0, 1});
  CHECK(ok.feasible);
  CHECK(ok.value == doctest::Approx(2.0));
  auto best = sub.evaluate({1, 0});
  CHECK(best.value == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("trivial second stage reduces to a longest path") {
  struct Zero : SubproblemOracle {
    SubproblemResult evaluate(const std::vector<double>&) const override {
      CutRow c;
      c.z_coeff = 1.0;
      c.rhs = 0.0;
      c.sense = CutSense::Le;
      return {true, 0.0, {c}, 0};
    }
  } zero;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 6; ++k) pts.push_back({double(rng() % 2), double(rng() % 3), double(rng() % 2)});
    std::vector<double> c{double(int(rng() % 7) - 3), double(int(rng() % 7) - 3), double(int(rng() % 7) - 3)};
    PointSetMaster m(Sense::Max, c, pts, -5, 5);
    auto d = dd::DecisionDiagram::from_paths(m.points());
    for (std::size_t j = 0; j < 3; ++j)
      for (auto& a : d.arcs_mut(j)) a.weight = c[j] * a.label.lo;
    const auto best = dd::optimal_path(d, Sense::Max);
    for (std::size_t w : {1, 2, 8}) {
      EngineConfig cfg;
      cfg.width = w;
      const auto rep = dd_bd_solve(m, zero, cfg);
      REQUIRE(rep.status == SolveStatus::Optimal);
      CHECK(rep.value == doctest::Approx(best.value));
      CHECK(rep.x == best.assignment);
    }
  }
}

TEST_CASE("random two-stage problems agree with enumeration") {
  std::mt19937_64 rng(2024);
  int infeasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Sense sense = trial % 2 ? Sense::Min : Sense::Max;
    auto inst = random_two_stage(rng, sense);
    const auto truth = enumerate(inst.master, inst.sub);
    for (std::size_t w : {1, 2, 3}) {
      for (auto bp : {BranchPrefixes::LongestOnly, BranchPrefixes::All}) {
        for (bool skip : {true, false}) {
          EngineConfig cfg;
          cfg.width = w;
          cfg.branch_prefixes = bp;
          cfg.skip_relaxed_when_exact = skip;
          cfg.relaxed_cuts = trial % 3 != 0;
          const auto rep = dd_bd_solve(inst.master, inst.sub, cfg);
          if (!truth.feasible) {
            CHECK(rep.status == SolveStatus::Infeasible);
            continue;
          }
          REQUIRE(rep.status == SolveStatus::Optimal);
          CHECK(rep.value == doctest::Approx(truth.value).epsilon(1e-6));
          // reported value re-evaluates at the reported point
          const auto out = lp::solve(inst.sub.primal(rep.x));
          REQUIRE(std::holds_alternative<lp::Optimal>(out));
          CHECK(inst.master.master_cost(rep.x) + std::get<lp::Optimal>(out).objective ==
                doctest::Approx(rep.value).epsilon(1e-6));
        }
      }
    }
    infeasible += !truth.feasible;
  }
  CHECK(infeasible < 60);
}

TEST_CASE("bound events sandwich the optimum") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const Sense sense = trial % 2 ? Sense::Min : Sense::Max;
    auto inst = random_two_stage(rng, sense);
    const auto truth = enumerate(inst.master, inst.sub);
    if (!truth.feasible) continue;
    std::size_t violations = 0, events = 0;
    EngineConfig cfg;
    cfg.observer = [&](const BoundEvent& e) {
      ++events;
      if (!e.partial.empty()) return;
      const bool ok = e.kind == BoundKind::Relaxed
                          ? (sense == Sense::Max ? e.value >= truth.value - 1e-6 : e.value <= truth.value + 1e-6)
                          : (sense == Sense::Max ? e.value <= truth.value + 1e-6 : e.value >= truth.value - 1e-6);
      violations += !ok;
    };
    dd_bd_solve(inst.master, inst.sub, cfg);
    CHECK(events > 0);
    CHECK(violations == 0);
  }
}

TEST_CASE("cost tuple reward on the reduced-versus-tree example") {
  // tree over {(0,0), (1,0)} with z <= 3x1 + 2x2 and z <= -3x1 - 5x2 + 3
  auto tree = dd::DecisionDiagram(std::vector<dd::LayerKind>(2, dd::LayerKind::Discrete));
  tree.add_node(1);
  tree.add_node(1);
  tree.add_arc(0, {0, 0, dd::Label::point(0), 0});
  tree.add_arc(0, {0, 1, dd::Label::point(1), 0});
  tree.add_arc(1, {0, 0, dd::Label::point(0), 0});
  tree.add_arc(1, {1, 0, dd::Label::point(0), 0});
  CutRow c1, c2;
  c1.coeffs = {{0, -3}, {1, -2}};
  c1.z_coeff = 1;
  c1.rhs = 0;
  c2.coeffs = {{0, 3}, {1, 5}};
  c2.z_coeff = 1;
  c2.rhs = 3;
  const double r = cost_tuple_reward(tree, {c1, c2});
  CHECK(r == 0.0);

  auto zdd = dd::append_continuous_layer(tree, -100, 100);
  for (auto& a : zdd.arcs_mut(0)) a.weight = 0;
  zdd = apply_cuts(zdd, {c1, c2});
  CHECK(dd::optimal_path(zdd, Sense::Max).value == r);

  // the reduced form merges the two middle nodes
  auto reduced = dd::merge_equivalent_nodes(tree);
  CHECK(reduced.layer_size(1) == 1);
  CHECK_THROWS_AS(cost_tuple_reward(reduced, {c1, c2}), PropertyViolation);

  auto single = dd::DecisionDiagram::from_paths({{1, 0, 1}});
  CutRow five;
  five.z_coeff = 1;
  five.rhs = 5;
  CHECK(cost_tuple_reward(single, {five}) == 5.0);
}

TEST_CASE("cost tuple reward matches refinement on random trees") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    // distinct prefixes of length n-1, one completion each, gives a tree
    std::map<std::vector<double>, double> chosen;
    for (int k = 0; k < 6; ++k) {
      std::vector<double> p(n - 1);
      for (auto& v : p) v = double(rng() % 3);
      chosen.emplace(p, double(rng() % 3));
    }
    dd::DecisionDiagram tree(std::vector<dd::LayerKind>(n, dd::LayerKind::Discrete));
    std::vector<std::vector<double>> paths;
    for (auto [p, last] : chosen) {
      auto q = p;
      q.push_back(last);
      paths.push_back(q);
    }
    // one chain per path keeps every in-degree at one
    std::vector<std::size_t> prev_layer_node;
    std::map<std::vector<double>, std::size_t> node_of;  // prefix -> node index
    node_of[{}] = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& q : paths) {
        std::vector<double> head(q.begin(), q.begin() + static_cast<long>(j + 1));
        std::vector<double> tail(q.begin(), q.begin() + static_cast<long>(j));
        if (j + 1 < n) {
          if (node_of.count(head)) continue;
          node_of[head] = tree.add_node(j + 1);
          tree.add_arc(j, {node_of[tail], node_of[head], dd::Label::point(q[j]), 0});
        } else {
          tree.add_arc(j, {node_of[tail], 0, dd::Label::point(q[j]), 0});
        }
      }
    }
    std::vector<CutRow> cuts;
    const int ncuts = 1 + int(rng() % 4);
    for (int k = 0; k < ncuts; ++k) {
      CutRow c;
      for (std::size_t j = 0; j < n; ++j) c.coeffs[j] = double(int(rng() % 9) - 4);
      c.z_coeff = 1;
      c.rhs = double(int(rng() % 11) - 5);
      cuts.push_back(c);
    }
    const double r = cost_tuple_reward(tree, cuts);
    auto zdd = dd::append_continuous_layer(tree, -1000, 1000);
    zdd = apply_cuts(zdd, cuts);
    CHECK(dd::optimal_path(zdd, Sense::Max).value == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("exact cutset") {
  const PointSetMaster m(Sense::Max, {1, 2, 3}, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}, {1, 1, 0}}, -1, 1);
  const auto exact = m.build_exact({}).dd;
  const auto cs = exact_cutset(exact);
  CHECK(cs.layer == exact.num_node_layers() - 2);
  CHECK(cs.nodes.size() == exact.layer_size(cs.layer));

  const auto narrow = m.build_relaxed({}, 1);
  CHECK_FALSE(narrow.exact);
  const auto cs1 = exact_cutset(narrow.dd);
  CHECK(cs1.layer == 0);
  CHECK(cs1.nodes == std::vector<std::size_t>{0});

  const auto two = m.build_relaxed({}, 2);
  const auto cs2 = exact_cutset(two.dd);
  CHECK(cs2.layer == 1);
  CHECK(cs2.nodes.size() == 2);
}

TEST_CASE("point-set oracles bracket the exact set") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 10; ++k) pts.push_back({double(rng() % 2), double(rng() % 3), double(rng() % 2), double(rng() % 2)});
    const PointSetMaster m(trial % 2 ? Sense::Min : Sense::Max, {1, -1, 2, 0.5}, pts, -3, 3);
    auto xs = [](const dd::DecisionDiagram& d) {
      std::set<std::vector<double>> out;
      for (auto s : dd::enumerate_solutions(d)) {
        s.pop_back();
        out.insert(s);
      }
      return out;
    };
    const auto ex = xs(m.build_exact({}).dd);
    CHECK(ex == std::set<std::vector<double>>(m.points().begin(), m.points().end()));
    for (std::size_t w : {1, 2, 3}) {
      const auto res = xs(m.build_restricted({}, w).dd);
      const auto rel = xs(m.build_relaxed({}, w).dd);
      CHECK(std::includes(ex.begin(), ex.end(), res.begin(), res.end()));
      CHECK(std::includes(rel.begin(), rel.end(), ex.begin(), ex.end()));
      CHECK_FALSE(res.empty());
    }
  }
}

TEST_CASE("cut pool deduplicates on rounded coefficients") {
  CutPool pool;
  CutRow a;
  a.coeffs = {{0, 2.0 / 3.0}, {1, 1.0}};
  a.rhs = 1;
  CHECK(pool.add(a));
  auto b = a;
  b.coeffs[0] += 1e-13;
  CHECK_FALSE(pool.add(b));
  auto c = a;
  c.sense = CutSense::Ge;
  CHECK(pool.add(c));
  auto d = a;
  d.coeffs[2] = 0.0;  // explicit zero is the same cut
  CHECK_FALSE(pool.add(d));
  CHECK(pool.size() == 2);
}

TEST_CASE("report serialization") {
  const auto master = two_binary_master();
  const LinearSubproblem sub(two_binary_second_stage());
  const auto rep = dd_bd_solve(master, sub, EngineConfig{});
  const auto j = report_to_json(rep, "ex2");
  CHECK(j["status"] == "optimal");
  CHECK(j["counts"]["feasibility_cuts"] == 1);
  CHECK(j["cuts"].size() == 2);
  const auto row = csv_row(rep, "ex2", "dd-bd");
  CHECK(row.rfind("ddbd-csv-1,ex2,dd-bd,optimal,3.666666667,", 0) == 0);
  const auto header = csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("time limit returns the incumbent status") {
  const auto master = two_binary_master();
  const LinearSubproblem sub(two_binary_second_stage());
  EngineConfig cfg;
  cfg.time_limit_seconds = 0.0;
  const auto rep = dd_bd_solve(master, sub, cfg);
  CHECK(rep.status == SolveStatus::TimeLimit);
}
