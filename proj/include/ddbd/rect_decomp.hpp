#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddbd/decision_diagram.hpp"
#include "ddbd/lp.hpp"
#include "json.hpp"

namespace ddbd::rect {

using Point = std::vector<double>;

inline constexpr double kHullTol = 1e-7;
inline constexpr double kEquivTol = 1e-9;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Box {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.size(); }
  std::vector<Point> vertices() const;
};

struct PieceSet {
  std::vector<Box> boxes;
  std::map<std::size_t, double> fixed_coords;

  std::vector<Point> box_vertices() const;
};

struct LinearConstraint {
  std::vector<double> a;
  lp::RowSense sense = lp::RowSense::Le;
  double b = 0.0;
};

// Bounded polyhedron with optional integrality; P is a union of these.
struct Component {
  Point lo;
  Point hi;
  std::vector<std::size_t> integer;
  std::vector<LinearConstraint> rows;

  bool contains(const Point& x, double tol = kEquivTol) const;
};

struct SampleSet {
  std::size_t dim = 0;
  std::vector<Point> points;
  std::function<bool(const Point&)> contains;
};

SampleSet make_sample_set(std::size_t dim, std::vector<Component> components, const std::vector<Point>& candidates,
                          bool drop_outside);

struct Report {
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii_sampled = false;
  std::vector<std::string> notes;

  bool all() const { return cond_i && cond_ii && cond_iii_sampled; }
};

Report verify_decomposition(const SampleSet& p, const std::set<std::size_t>& index_set,
                            const std::vector<PieceSet>& pieces);

using Objective = std::function<double(const Point&)>;

struct Maxima {
  double over_samples = 0.0;
  double over_extreme_points = 0.0;
  double over_box_vertices = 0.0;
  bool agree() const;
};

std::vector<Maxima> objective_maxima(const SampleSet& p, const std::vector<PieceSet>& pieces,
                                     const std::vector<Objective>& objectives);

bool equivalence_check(const SampleSet& p, const std::set<std::size_t>& index_set,
                       const std::vector<PieceSet>& pieces, const std::vector<Objective>& objectives);

bool in_convex_hull(const Point& x, const std::vector<Point>& points, double tol = kHullTol);
std::vector<Point> extreme_points(std::vector<Point> points);

// Convex quadratics in the I coordinates plus pseudo-random tabulated terms
// on the remaining coordinates.
std::vector<Objective> random_convex_family(std::size_t dim, const std::set<std::size_t>& index_set,
                                            std::size_t count, std::uint64_t seed);

// Reduced diagram whose paths are exactly the given points.
dd::DecisionDiagram diagram_from_points(const std::vector<Point>& points);
// Reduced diagram over the vertex sets of the boxes.
dd::DecisionDiagram diagram_from_boxes(const std::vector<Box>& boxes);

struct Fixture {
  SampleSet set;
  std::set<std::size_t> index_set;
  std::vector<PieceSet> pieces;
  std::vector<std::string> objective_names;
  std::vector<Objective> objectives;
};

// Throws std::invalid_argument (or a json exception) on malformed input.
Fixture load_fixture(const nlohmann::json& j);

}  // namespace ddbd::rect
