#include "ddbd/rect_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ddbd::rect {

std::vector<Point> Box::vertices() const {
  std::vector<Point> out{Point{}};
  for (std::size_t i = 0; i < dim(); ++i) {
    std::vector<Point> next;
    for (const auto& p : out) {
      next.push_back(p);
      next.back().push_back(lo[i]);
      if (hi[i] != lo[i]) {
        next.push_back(p);
        next.back().push_back(hi[i]);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Point> PieceSet::box_vertices() const {
  std::vector<Point> v;
  for (const auto& b : boxes) {
    auto bv = b.vertices();
    v.insert(v.end(), bv.begin(), bv.end());
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool Component::contains(const Point& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  for (std::size_t i : integer)
    if (std::abs(x[i] - std::round(x[i])) > tol) return false;
  for (const auto& r : rows) {
    double ax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) ax += r.a[i] * x[i];
    if (r.sense == lp::RowSense::Le && ax > r.b + tol) return false;
    if (r.sense == lp::RowSense::Ge && ax < r.b - tol) return false;
    if (r.sense == lp::RowSense::Eq && std::abs(ax - r.b) > tol) return false;
  }
  return true;
}

SampleSet make_sample_set(std::size_t dim, std::vector<Component> components, const std::vector<Point>& candidates,
                          bool drop_outside) {
  for (const auto& c : components) {
    if (c.lo.size() != dim || c.hi.size() != dim) throw DimensionMismatch("membership component dimension");
    for (const auto& r : c.rows)
      if (r.a.size() != dim) throw DimensionMismatch("membership row dimension");
  }
  SampleSet s;
  s.dim = dim;
  s.contains = [comps = std::move(components)](const Point& x) {
    return std::any_of(comps.begin(), comps.end(), [&](const Component& c) { return c.contains(x); });
  };
  for (const auto& p : candidates) {
    if (p.size() != dim) throw DimensionMismatch("sample point dimension");
    if (s.contains(p)) s.points.push_back(p);
    else if (!drop_outside) throw std::invalid_argument("listed sample point fails membership");
  }
  return s;
}

bool in_convex_hull(const Point& x, const std::vector<Point>& points, double tol) {
  if (points.empty()) return false;
  const std::size_t k = points.size();
  lp::LinearProgram prog(k, lp::Sense::Min);
  prog.add_row(std::vector<double>(k, 1.0), lp::RowSense::Eq, 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> a(k);
    for (std::size_t p = 0; p < k; ++p) a[p] = points[p][i];
    prog.add_row(std::move(a), lp::RowSense::Eq, x[i]);
  }
  auto out = lp::solve(prog);
  if (!std::holds_alternative<lp::Optimal>(out)) return false;
  const auto& lam = std::get<lp::Optimal>(out).x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = 0.0;
    for (std::size_t p = 0; p < k; ++p) v += lam[p] * points[p][i];
    if (std::abs(v - x[i]) > tol * (1 + std::abs(x[i]))) return false;
  }
  return true;
}

std::vector<Point> extreme_points(std::vector<Point> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Point> ext;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<Point> others;
    for (std::size_t k = 0; k < points.size(); ++k)
      if (k != i) others.push_back(points[k]);
    if (!in_convex_hull(points[i], others)) ext.push_back(points[i]);
  }
  return ext;
}

namespace {

bool matches_fixed(const Point& x, const PieceSet& piece) {
  for (auto [i, v] : piece.fixed_coords)
    if (std::abs(x[i] - v) > kEquivTol) return false;
  return true;
}

void check_dims(const SampleSet& p, const std::set<std::size_t>& index_set, const std::vector<PieceSet>& pieces) {
  if (pieces.empty()) throw std::invalid_argument("no pieces given");
  for (std::size_t i : index_set)
    if (i >= p.dim) throw DimensionMismatch("index set entry beyond dimension");
  for (const auto& pt : p.points)
    if (pt.size() != p.dim) throw DimensionMismatch("sample point dimension");
  for (const auto& piece : pieces) {
    for (const auto& b : piece.boxes) {
      if (b.lo.size() != p.dim || b.hi.size() != p.dim) throw DimensionMismatch("box dimension");
      for (std::size_t i = 0; i < p.dim; ++i)
        if (b.lo[i] > b.hi[i]) throw std::invalid_argument("box with lo > hi");
    }
    for (auto [i, v] : piece.fixed_coords)
      if (i >= p.dim) throw DimensionMismatch("fixed coordinate beyond dimension");
  }
}

}  // namespace

Report verify_decomposition(const SampleSet& p, const std::set<std::size_t>& index_set,
                            const std::vector<PieceSet>& pieces) {
  check_dims(p, index_set, pieces);
  Report r;
  r.cond_i = true;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const auto& piece = pieces[j];
    for (std::size_t i = 0; i < p.dim; ++i) {
      if (index_set.count(i)) continue;
      auto it = piece.fixed_coords.find(i);
      if (it == piece.fixed_coords.end()) {
        r.cond_i = false;
        r.notes.push_back("piece " + std::to_string(j) + " leaves coordinate " + std::to_string(i) + " free");
        continue;
      }
    }
    for (const auto& b : piece.boxes)
      for (auto [i, v] : piece.fixed_coords)
        if (b.lo[i] != v || b.hi[i] != v) {
          r.cond_i = false;
          r.notes.push_back("piece " + std::to_string(j) + " has a box not pinned at coordinate " + std::to_string(i));
        }
  }

  std::vector<std::vector<Point>> verts(pieces.size());
  for (std::size_t j = 0; j < pieces.size(); ++j) verts[j] = pieces[j].box_vertices();

  r.cond_ii = true;
  for (std::size_t j = 0; j < pieces.size(); ++j)
    for (const auto& v : verts[j])
      if (!p.contains(v)) {
        r.cond_ii = false;
        r.notes.push_back("box vertex of piece " + std::to_string(j) + " lies outside the set");
        break;
      }
  for (const auto& x : p.points) {
    bool covered = false;
    for (std::size_t j = 0; j < pieces.size() && !covered; ++j)
      covered = matches_fixed(x, pieces[j]) && in_convex_hull(x, verts[j]);
    if (!covered) {
      r.cond_ii = false;
      r.notes.push_back("a sampled point is not covered by any piece");
      break;
    }
  }

  r.cond_iii_sampled = true;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    std::vector<Point> mine;
    for (const auto& x : p.points)
      if (matches_fixed(x, pieces[j])) mine.push_back(x);
    bool ok = !mine.empty();
    for (const auto& x : mine) ok = ok && in_convex_hull(x, verts[j]);
    for (const auto& v : verts[j]) ok = ok && in_convex_hull(v, mine);
    if (!ok) {
      r.cond_iii_sampled = false;
      r.notes.push_back("piece " + std::to_string(j) + " hull differs from its sampled points");
    }
  }
  return r;
}

bool Maxima::agree() const {
  auto close = [](double a, double b) { return std::abs(a - b) <= kEquivTol * (1 + std::max(std::abs(a), std::abs(b))); };
  return close(over_samples, over_extreme_points) && close(over_samples, over_box_vertices);
}

std::vector<Maxima> objective_maxima(const SampleSet& p, const std::vector<PieceSet>& pieces,
                                     const std::vector<Objective>& objectives) {
  std::vector<Point> all_vertices, all_extreme;
  for (const auto& piece : pieces) {
    auto v = piece.box_vertices();
    auto e = extreme_points(v);
    all_vertices.insert(all_vertices.end(), v.begin(), v.end());
    all_extreme.insert(all_extreme.end(), e.begin(), e.end());
  }
  auto max_over = [](const Objective& f, const std::vector<Point>& pts) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& x : pts) m = std::max(m, f(x));
    return m;
  };
  std::vector<Maxima> out;
  for (const auto& f : objectives)
    out.push_back(Maxima{max_over(f, p.points), max_over(f, all_extreme), max_over(f, all_vertices)});
  return out;
}

bool equivalence_check(const SampleSet& p, const std::set<std::size_t>& index_set,
                       const std::vector<PieceSet>& pieces, const std::vector<Objective>& objectives) {
  check_dims(p, index_set, pieces);
  auto m = objective_maxima(p, pieces, objectives);
  return std::all_of(m.begin(), m.end(), [](const Maxima& x) { return x.agree(); });
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// deterministic pseudo-random value in [-5, 5] keyed by the non-I coordinates
double tabulated(const Point& x, const std::set<std::size_t>& index_set, std::uint64_t salt) {
  std::uint64_t h = salt;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (index_set.count(i)) continue;
    h = splitmix(h ^ static_cast<std::uint64_t>(std::llround(x[i] * 1e6)));
  }
  return (static_cast<double>(splitmix(h) >> 11) / 9007199254740992.0) * 10.0 - 5.0;
}

}  // namespace

std::vector<Objective> random_convex_family(std::size_t dim, const std::set<std::size_t>& index_set,
                                            std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::size_t> idx(index_set.begin(), index_set.end());
  const std::size_t k = idx.size();
  std::vector<Objective> out;
  for (std::size_t c = 0; c < count; ++c) {
    // Q = L L^T is positive semidefinite
    std::vector<double> l(k * k), lin(k), cross(k);
    for (auto& v : l) v = nd(rng);
    for (auto& v : lin) v = nd(rng);
    for (auto& v : cross) v = nd(rng);
    const std::uint64_t salt0 = rng(), salt1 = rng();
    out.push_back([=](const Point& x) {
      if (x.size() != dim) throw DimensionMismatch("objective dimension");
      double q = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        double lx = 0.0;
        for (std::size_t s = 0; s < k; ++s) lx += l[r * k + s] * x[idx[s]];
        q += lx * lx;
      }
      const double t1 = tabulated(x, index_set, salt1);
      for (std::size_t s = 0; s < k; ++s) q += (lin[s] + cross[s] * t1) * x[idx[s]];
      return q + tabulated(x, index_set, salt0);
    });
  }
  return out;
}

dd::DecisionDiagram diagram_from_points(const std::vector<Point>& points) {
  return dd::merge_equivalent_nodes(dd::DecisionDiagram::from_paths(points));
}

dd::DecisionDiagram diagram_from_boxes(const std::vector<Box>& boxes) {
  std::vector<Point> pts;
  for (const auto& b : boxes) {
    auto v = b.vertices();
    pts.insert(pts.end(), v.begin(), v.end());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return diagram_from_points(pts);
}

}  // namespace ddbd::rect
