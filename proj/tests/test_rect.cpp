#include <algorithm>
#include <fstream>
#include <random>

#include "ddbd/rect_decomp.hpp"
#include "doctest.h"

using namespace ddbd::rect;

namespace {

Fixture load(const std::string& name) {
  std::ifstream in(std::string(DDBD_TEST_DATA) + "/fixtures/" + name);
  REQUIRE(in.good());
  return load_fixture(nlohmann::json::parse(in));
}

}  // namespace

TEST_CASE("mixed-integer example decomposition passes every condition") {
  auto f = load("mixed_integer_decomposition.json");
  auto r = verify_decomposition(f.set, f.index_set, f.pieces);
  CHECK(r.cond_i);
  CHECK(r.cond_ii);
  CHECK(r.cond_iii_sampled);
  CHECK(equivalence_check(f.set, f.index_set, f.pieces, f.objectives));
  auto m = objective_maxima(f.set, f.pieces, f.objectives);
  CHECK(m[0].over_samples == doctest::Approx(4.0));  // x1 + x2 + x3 at (2,1,1) or (1,2,1)
}

TEST_CASE("extreme points of the decomposition pieces") {
  auto f = load("mixed_integer_decomposition.json");
  std::vector<Point> ext;
  for (const auto& p : f.pieces) {
    auto e = extreme_points(p.box_vertices());
    ext.insert(ext.end(), e.begin(), e.end());
  }
  std::sort(ext.begin(), ext.end());
  std::vector<Point> expected{{0, 0, 0}, {0, 2, 0}, {1, 0, 0}, {1, 0, 1}, {1, 2, 0}, {1, 2, 1}, {2, 0, 1}, {2, 1, 1}};
  CHECK(ext == expected);
}

TEST_CASE("finite set decomposed into its own points") {
  std::vector<Point> pts{{0, 0}, {0, 2}, {1, 2}, {2, 0}, {2, 1}};
  std::vector<Component> comps;
  for (const auto& p : pts) comps.push_back(Component{p, p, {0, 1}, {}});
  auto s = make_sample_set(2, comps, pts, false);
  std::vector<PieceSet> pieces;
  for (const auto& p : pts) pieces.push_back(PieceSet{{Box{p, p}}, {{0, p[0]}, {1, p[1]}}});
  CHECK(verify_decomposition(s, {}, pieces).all());
  CHECK(verify_decomposition(s, {0, 1}, pieces).all());
  CHECK(equivalence_check(s, {0, 1}, pieces, random_convex_family(2, {0, 1}, 50, 4)));
}

TEST_CASE("extreme-point cover of the absolute value set fails") {
  auto f = load("abs_counterexample.json");
  auto r = verify_decomposition(f.set, f.index_set, f.pieces);
  CHECK_FALSE(r.all());
  CHECK_FALSE(r.cond_i);
  CHECK_FALSE(equivalence_check(f.set, f.index_set, f.pieces, f.objectives));
  auto m = objective_maxima(f.set, f.pieces, f.objectives);
  CHECK(m[0].over_samples == 0.0);
  CHECK(m[0].over_extreme_points == -1.0);
}

TEST_CASE("box vertex outside the set breaks the covering condition") {
  auto f = load("vertex_outside.json");
  auto r = verify_decomposition(f.set, f.index_set, f.pieces);
  CHECK(r.cond_i);
  CHECK_FALSE(r.cond_ii);
}

TEST_CASE("constant objective always agrees") {
  auto f = load("mixed_integer_decomposition.json");
  CHECK(equivalence_check(f.set, f.index_set, f.pieces, {[](const Point&) { return 0.0; }}));
}

TEST_CASE("random convex family holds on passing decompositions") {
  auto f = load("mixed_integer_decomposition.json");
  REQUIRE(verify_decomposition(f.set, f.index_set, f.pieces).all());
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    CHECK(equivalence_check(f.set, f.index_set, f.pieces, random_convex_family(3, f.index_set, 50, seed)));
}

TEST_CASE("dimension mismatches are reported") {
  auto f = load("mixed_integer_decomposition.json");
  auto pieces = f.pieces;
  pieces[0].boxes[0].lo.pop_back();
  CHECK_THROWS_AS(verify_decomposition(f.set, f.index_set, pieces), DimensionMismatch);
  CHECK_THROWS_AS(verify_decomposition(f.set, {7}, f.pieces), DimensionMismatch);
}

TEST_CASE("point diagram and box diagram widths") {
  auto d1 = diagram_from_points({{0, 0}, {0, 2}, {1, 2}, {2, 0}, {2, 1}});
  auto d2 = diagram_from_boxes({Box{{0, 0}, {1, 2}}, Box{{2, 0}, {2, 1}}});
  CHECK(d1.width() == 3);
  CHECK(d2.width() == 2);
  auto fam = random_convex_family(2, {0, 1}, 50, 99);
  for (const auto& fn : fam) {
    auto best = [&](const ddbd::dd::DecisionDiagram& d) {
      double m = -1e300;
      for (const auto& s : ddbd::dd::enumerate_solutions(d)) m = std::max(m, fn(s));
      return m;
    };
    CHECK(std::abs(best(d1) - best(d2)) <= 1e-7);
  }
}

TEST_CASE("convex hull membership") {
  std::vector<Point> sq{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  CHECK(in_convex_hull({0.5, 0.5}, sq));
  CHECK_FALSE(in_convex_hull({1.5, 0.5}, sq));
  CHECK(extreme_points({{0, 0}, {1, 0}, {0.5, 0}, {0, 1}}).size() == 3);
}
