#pragma once

// Brute-force LP reference: enumerate basic solutions of a box-bounded LP.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "ddbd/lp.hpp"

namespace ddbd::testing {

struct VertexResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Requires finite bounds on every variable.
inline VertexResult enumerate_vertices(const lp::LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  struct Con {
    std::vector<double> a;
    double b;
  };
  std::vector<Con> forced, optional;
  for (const auto& r : lp.rows) (r.sense == lp::RowSense::Eq ? forced : optional).push_back({r.coeffs, r.rhs});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    optional.push_back({e, lp.lo[j]});
    optional.push_back({e, lp.hi[j]});
  }
  VertexResult best;
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < lp.lo[j] - 1e-7 || x[j] > lp.hi[j] + 1e-7) return false;
    for (const auto& r : lp.rows) {
      double ax = 0.0;
      for (std::size_t j = 0; j < n; ++j) ax += r.coeffs[j] * x[j];
      const double tol = 1e-7 * (1 + std::abs(r.rhs));
      if (r.sense == lp::RowSense::Le && ax > r.rhs + tol) return false;
      if (r.sense == lp::RowSense::Ge && ax < r.rhs - tol) return false;
      if (r.sense == lp::RowSense::Eq && std::abs(ax - r.rhs) > tol) return false;
    }
    return true;
  };
  if (forced.size() > n) {
    // overdetermined equalities: fall back to choosing n of them among all
    optional.insert(optional.begin(), forced.begin(), forced.end());
    forced.clear();
  }
  const std::size_t need = n - forced.size();
  std::vector<std::size_t> pick(need);
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == need) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (const auto& c : forced) a.push_back(c.a), b.push_back(c.b);
      for (std::size_t k : pick) a.push_back(optional[k].a), b.push_back(optional[k].b);
      auto x = solve_square(a, b);
      if (!x || !feasible(*x)) return;
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * (*x)[j];
      const bool better = lp.sense == lp::Sense::Min ? obj < best.objective : obj > best.objective;
      if (!best.feasible || better) best = {true, obj, *x};
      return;
    }
    for (std::size_t k = start; k < optional.size(); ++k) {
      pick[depth] = k;
      self(self, k + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

inline lp::LinearProgram random_box_lp(std::mt19937_64& rng, std::size_t max_vars, std::size_t max_rows) {
  std::uniform_int_distribution<int> nv(1, static_cast<int>(max_vars)), nr(1, static_cast<int>(max_rows));
  std::uniform_int_distribution<int> coef(-5, 5), lo(-3, 0), width(1, 5), sense(0, 5), rhs(-8, 8);
  const std::size_t n = nv(rng), m = nr(rng);
  lp::LinearProgram lp(n, rng() % 2 ? lp::Sense::Min : lp::Sense::Max);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] = coef(rng);
    lp.lo[j] = lo(rng);
    lp.hi[j] = lp.lo[j] + width(rng);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> a(n);
    for (auto& v : a) v = coef(rng);
    const int s = sense(rng);
    lp.add_row(a, s == 0 ? lp::RowSense::Eq : (s % 2 ? lp::RowSense::Le : lp::RowSense::Ge), rhs(rng));
  }
  return lp;
}

}  // namespace ddbd::testing
