#include "ddbd/rect_decomp.hpp"

namespace ddbd::rect {

using nlohmann::json;

namespace {

lp::RowSense parse_sense(const std::string& s) {
  if (s == "<=") return lp::RowSense::Le;
  if (s == ">=") return lp::RowSense::Ge;
  if (s == "=") return lp::RowSense::Eq;
  throw std::invalid_argument("bad sense '" + s + "'");
}

Point vec(const json& j, std::size_t dim, const char* what) {
  auto v = j.get<Point>();
  if (v.size() != dim) throw DimensionMismatch(std::string(what) + " has wrong dimension");
  return v;
}

std::vector<Point> grid_points(const json& axes, std::size_t dim) {
  if (axes.size() != dim) throw DimensionMismatch("grid axes count");
  std::vector<Point> out{Point{}};
  for (const auto& axis : axes) {
    std::vector<Point> next;
    for (const auto& p : out)
      for (double v : axis.get<std::vector<double>>()) {
        next.push_back(p);
        next.back().push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

Objective parse_objective(const json& j, std::size_t dim) {
  Point lin(dim, 0.0);
  std::vector<std::vector<double>> quad;
  if (j.contains("linear")) lin = vec(j["linear"], dim, "linear objective");
  if (j.contains("quadratic")) {
    quad = j["quadratic"].get<std::vector<std::vector<double>>>();
    if (quad.size() != dim) throw DimensionMismatch("quadratic objective rows");
    for (const auto& r : quad)
      if (r.size() != dim) throw DimensionMismatch("quadratic objective columns");
  }
  const double constant = j.value("constant", 0.0);
  return [=](const Point& x) {
    double v = constant;
    for (std::size_t i = 0; i < dim; ++i) v += lin[i] * x[i];
    for (std::size_t i = 0; i < quad.size(); ++i)
      for (std::size_t k = 0; k < dim; ++k) v += x[i] * quad[i][k] * x[k];
    return v;
  };
}

}  // namespace

Fixture load_fixture(const json& j) {
  if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported fixture version");
  Fixture f;
  const std::size_t dim = j.at("dimension").get<std::size_t>();
  for (std::size_t i : j.at("index_set").get<std::vector<std::size_t>>()) {
    if (i >= dim) throw DimensionMismatch("index set entry beyond dimension");
    f.index_set.insert(i);
  }
  std::vector<Component> comps;
  for (const auto& c : j.at("membership").at("union")) {
    Component comp;
    comp.lo = vec(c.at("lo"), dim, "component lo");
    comp.hi = vec(c.at("hi"), dim, "component hi");
    if (c.contains("integer")) comp.integer = c["integer"].get<std::vector<std::size_t>>();
    for (std::size_t i : comp.integer)
      if (i >= dim) throw DimensionMismatch("integer index beyond dimension");
    if (c.contains("rows"))
      for (const auto& r : c["rows"])
        comp.rows.push_back({vec(r.at("a"), dim, "membership row"), parse_sense(r.at("sense").get<std::string>()),
                             r.at("b").get<double>()});
    comps.push_back(std::move(comp));
  }
  const auto& samples = j.at("samples");
  std::vector<Point> cand;
  bool from_grid = false;
  if (samples.contains("grid")) {
    cand = grid_points(samples["grid"], dim);
    from_grid = true;
  }
  if (samples.contains("points"))
    for (const auto& p : samples["points"]) cand.push_back(vec(p, dim, "sample point"));
  f.set = make_sample_set(dim, std::move(comps), cand, from_grid);
  if (f.set.points.empty()) throw std::invalid_argument("fixture yields no sample points");
  for (const auto& pj : j.at("pieces")) {
    PieceSet piece;
    if (pj.contains("fixed"))
      for (auto& [k, v] : pj["fixed"].items()) {
        const std::size_t i = std::stoul(k);
        if (i >= dim) throw DimensionMismatch("fixed coordinate beyond dimension");
        piece.fixed_coords[i] = v.get<double>();
      }
    for (const auto& b : pj.at("boxes")) {
      Box box;
      if (b.is_array()) {
        box.lo = box.hi = vec(b, dim, "point box");
      } else {
        box.lo = vec(b.at("lo"), dim, "box lo");
        box.hi = vec(b.at("hi"), dim, "box hi");
      }
      piece.boxes.push_back(std::move(box));
    }
    f.pieces.push_back(std::move(piece));
  }
  if (j.contains("objectives"))
    for (const auto& o : j["objectives"]) {
      f.objective_names.push_back(o.value("name", "objective"));
      f.objectives.push_back(parse_objective(o, dim));
    }
  return f;
}

}  // namespace ddbd::rect
