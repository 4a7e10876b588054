#include <random>
#include <sstream>

#include "ddbd/lp.hpp"
#include "doctest.h"
#include "support/vertex_enum.hpp"

using namespace ddbd::lp;

namespace {

LinearProgram two_binary_dual(double x1, double x2) {
  // min -(x1+x2) p1 + (0.1 x1 + 0.3) p2 ; -p1 + 0.3 p2 >= 2 ; -p1 + 0.7 p2 >= 1
  LinearProgram lp(2, Sense::Min);
  lp.objective = {-(x1 + x2), 0.1 * x1 + 0.3};
  lp.add_row({-1.0, 0.3}, RowSense::Ge, 2.0);
  lp.add_row({-1.0, 0.7}, RowSense::Ge, 1.0);
  return lp;
}

}  // namespace

TEST_CASE("dual subproblem at (0,1) has the single vertex (0, 20/3)") {
  auto out = solve(two_binary_dual(0, 1));
  REQUIRE(std::holds_alternative<Optimal>(out));
  const auto& o = std::get<Optimal>(out);
  CHECK(o.x[0] == doctest::Approx(0.0));
  CHECK(o.x[1] == doctest::Approx(20.0 / 3.0));
  CHECK(o.objective == doctest::Approx(2.0));
  CHECK(verify_certificate(two_binary_dual(0, 1), out));
}

TEST_CASE("dual subproblem at (1,1) is unbounded along (1, 10/3)") {
  auto lp = two_binary_dual(1, 1);
  auto out = solve(lp);
  REQUIRE(std::holds_alternative<Unbounded>(out));
  const auto& r = std::get<Unbounded>(out).ray;
  CHECK(r[1] / r[0] == doctest::Approx(10.0 / 3.0));
}

TEST_CASE("trivial max 0 over x >= 0") {
  LinearProgram lp(1, Sense::Max);
  auto out = solve(lp);
  REQUIRE(std::holds_alternative<Optimal>(out));
  CHECK(std::get<Optimal>(out).x[0] == 0.0);
  CHECK(std::get<Optimal>(out).objective == 0.0);
}

TEST_CASE("primal subproblem at (1,1) is infeasible with Farkas ray proportional to (1, 10/3)") {
  // y1 + y2 >= 2 ; 0.3 y1 + 0.7 y2 <= 0.4
  LinearProgram lp(2, Sense::Max);
  lp.objective = {2.0, 1.0};
  lp.add_row({1.0, 1.0}, RowSense::Ge, 2.0);
  lp.add_row({0.3, 0.7}, RowSense::Le, 0.4);
  auto out = solve(lp);
  REQUIRE(std::holds_alternative<Infeasible>(out));
  const auto& y = std::get<Infeasible>(out).farkas;
  CHECK(y[1] / y[0] == doctest::Approx(10.0 / 3.0));
  CHECK(verify_certificate(lp, out));
}

TEST_CASE("verify_certificate rejects bad certificates") {
  LinearProgram lp(2, Sense::Max);
  lp.add_row({1.0, 1.0}, RowSense::Ge, 2.0);
  lp.add_row({0.3, 0.7}, RowSense::Le, 0.4);
  CHECK_FALSE(verify_certificate(lp, Infeasible{{0.3, -1.0}}));
  CHECK_FALSE(verify_certificate(lp, Unbounded{{0.0, 0.0}}));
  CHECK_FALSE(verify_certificate(lp, Infeasible{{0.0, 0.0}}));
  auto good = solve(two_binary_dual(0, 1));
  auto bad = std::get<Optimal>(good);
  bad.x[1] = 5.0;
  bad.objective = 1.5;
  CHECK_FALSE(verify_certificate(two_binary_dual(0, 1), bad));
}

TEST_CASE("free and upper-bounded variables") {
  // min x - y, x free, y <= 3, x + y >= 1, x >= -2 via row
  LinearProgram lp(2, Sense::Min);
  lp.objective = {1.0, -1.0};
  lp.lo = {-kInf, -kInf};
  lp.hi = {kInf, 3.0};
  lp.add_row({1.0, 1.0}, RowSense::Ge, 1.0);
  lp.add_row({1.0, 0.0}, RowSense::Ge, -2.0);
  auto out = solve(lp);
  REQUIRE(std::holds_alternative<Optimal>(out));
  CHECK(std::get<Optimal>(out).objective == doctest::Approx(-5.0));
}

TEST_CASE("unbounded with free variable") {
  LinearProgram lp(1, Sense::Max);
  lp.lo = {-kInf};
  lp.objective = {-1.0};
  auto out = solve(lp);
  REQUIRE(std::holds_alternative<Unbounded>(out));
  CHECK(std::get<Unbounded>(out).ray[0] < 0);
}

TEST_CASE("equality rows and redundant equalities") {
  LinearProgram lp(3, Sense::Min);
  lp.objective = {1, 2, 3};
  lp.add_row({1, 1, 1}, RowSense::Eq, 3);
  lp.add_row({2, 2, 2}, RowSense::Eq, 6);
  lp.add_row({1, 0, 0}, RowSense::Le, 1);
  auto out = solve(lp);
  REQUIRE(std::holds_alternative<Optimal>(out));
  CHECK(std::get<Optimal>(out).objective == doctest::Approx(1 + 2 * 2));
}

TEST_CASE("random box LPs agree with vertex enumeration and certify") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    auto lp = ddbd::testing::random_box_lp(rng, 5, 5);
    auto ref = ddbd::testing::enumerate_vertices(lp);
    auto out = solve(lp);
    CAPTURE(k);
    CHECK(verify_certificate(lp, out));
    if (ref.feasible) {
      REQUIRE(std::holds_alternative<Optimal>(out));
      CHECK(std::get<Optimal>(out).objective == doctest::Approx(ref.objective).epsilon(1e-6));
    } else {
      CHECK(std::holds_alternative<Infeasible>(out));
    }
  }
}

TEST_CASE("strong duality on larger random LPs") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    auto lp = ddbd::testing::random_box_lp(rng, 12, 12);
    auto out = solve(lp);
    CHECK(verify_certificate(lp, out));
  }
}

TEST_CASE("solve is deterministic") {
  std::mt19937_64 rng(3);
  auto lp = ddbd::testing::random_box_lp(rng, 6, 6);
  auto a = solve(lp), b = solve(lp);
  REQUIRE(a.index() == b.index());
  if (auto* o = std::get_if<Optimal>(&a)) {
    CHECK(o->x == std::get<Optimal>(b).x);
    CHECK(o->duals == std::get<Optimal>(b).duals);
  }
}

TEST_CASE("text fixture round trip") {
  std::istringstream in(
      "# dual subproblem\n"
      "min 0 0.3\n"
      "row -1 0.3 >= 2\n"
      "row -1 0.7 >= 1\n"
      "bounds 0 0 inf\n");
  auto lp = parse_lp_text(in);
  CHECK(lp.num_vars() == 2);
  CHECK(lp.num_rows() == 2);
  std::istringstream again(to_lp_text(lp));
  auto lp2 = parse_lp_text(again);
  CHECK(to_lp_text(lp2) == to_lp_text(lp));
  std::istringstream bad("min 1 2\nrow 1 <= 3\n");
  CHECK_THROWS_AS(parse_lp_text(bad), std::invalid_argument);
}
