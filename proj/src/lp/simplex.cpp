#include "ddbd/lp.hpp"

#include <algorithm>
#include <cmath>

namespace ddbd::lp {

LinearProgram::LinearProgram(std::size_t n, Sense s)
    : sense(s), objective(n, 0.0), lo(n, 0.0), hi(n, kInf) {}

std::size_t LinearProgram::add_var(double cost, double lower, double upper) {
  objective.push_back(cost);
  lo.push_back(lower);
  hi.push_back(upper);
  for (auto& r : rows) r.coeffs.push_back(0.0);
  return objective.size() - 1;
}

std::size_t LinearProgram::add_row(std::vector<double> coeffs, RowSense s, double rhs) {
  coeffs.resize(num_vars(), 0.0);
  rows.push_back(Row{std::move(coeffs), s, rhs});
  return rows.size() - 1;
}

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  if (lo.size() != n || hi.size() != n) throw std::invalid_argument("bound vector size mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw std::invalid_argument("non-finite objective entry");
    if (std::isnan(lo[j]) || std::isnan(hi[j]) || lo[j] > hi[j] || lo[j] == kInf || hi[j] == -kInf)
      throw std::invalid_argument("bad bounds on variable " + std::to_string(j));
  }
  for (const auto& r : rows) {
    if (r.coeffs.size() != n) throw std::invalid_argument("row width mismatch");
    if (!std::isfinite(r.rhs)) throw std::invalid_argument("non-finite rhs");
    for (double a : r.coeffs)
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite row entry");
  }
}

namespace {

// Each original variable x_j = offset + sum(coef * y_col) over nonnegative
// standard-form columns.
struct VarMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> cols;
};

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double rhs(std::size_t r) const { return at(r, n_); }
  // objective row is row m_
  double& cost(std::size_t c) { return at(m_, c); }
  double cost(std::size_t c) const { return at(m_, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= n_; ++c) at(pr, c) /= p;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Prices the objective row for costs c against the current basis.
  void price(const std::vector<double>& c) {
    for (std::size_t j = 0; j < n_; ++j) cost(j) = c[j];
    at(m_, n_) = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(m_, j) -= cb * at(r, j);
    }
  }

  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { Optimal, Unbounded };

struct Engine {
  Tableau tab;
  std::size_t allowed_cols;  // columns >= this never enter
  std::size_t pivots = 0;
  std::size_t cap;
  std::size_t unbounded_col = 0;

  PhaseResult run() {
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (tab.cost(j) < -kReducedCostTol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed_cols) return PhaseResult::Optimal;
      std::size_t leave = tab.m_;
      double best = kInf;
      for (std::size_t r = 0; r < tab.m_; ++r) {
        const double a = tab.at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = tab.rhs(r) / a;
        if (ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && tab.basis_[r] < tab.basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == tab.m_) {
        unbounded_col = enter;
        return PhaseResult::Unbounded;
      }
      if (++pivots > cap) throw NumericalFailure("simplex pivot cap exceeded");
      tab.pivot(leave, enter);
    }
  }
};

double row_scale(const std::vector<double>& a, const std::vector<double>& x, double b) {
  double s = std::abs(b);
  for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] * x[j]);
  return 1.0 + s;
}

void normalize_max_abs(std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  if (m > 0.0)
    for (double& e : v) e /= m;
}

}  // namespace

Outcome solve(const LinearProgram& lp, SolveStats* stats) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const std::size_t m0 = lp.num_rows();
  const double osign = lp.sense == Sense::Max ? -1.0 : 1.0;

  // variable substitution
  std::vector<VarMap> vmap(n);
  std::size_t ncols = 0;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // (col, width)
  for (std::size_t j = 0; j < n; ++j) {
    const bool flo = std::isfinite(lp.lo[j]);
    const bool fhi = std::isfinite(lp.hi[j]);
    if (flo) {
      vmap[j].offset = lp.lo[j];
      vmap[j].cols.push_back({ncols, 1.0});
      if (fhi) bound_rows.push_back({ncols, lp.hi[j] - lp.lo[j]});
      ++ncols;
    } else if (fhi) {
      vmap[j].offset = lp.hi[j];
      vmap[j].cols.push_back({ncols++, -1.0});
    } else {
      vmap[j].cols.push_back({ncols++, 1.0});
      vmap[j].cols.push_back({ncols++, -1.0});
    }
  }
  const std::size_t nstruct = ncols;
  const std::size_t m = m0 + bound_rows.size();
  std::size_t nslack = bound_rows.size();
  for (const auto& r : lp.rows)
    if (r.sense != RowSense::Eq) ++nslack;
  const std::size_t nart = m;
  const std::size_t N = nstruct + nslack + nart;
  const std::size_t art0 = nstruct + nslack;

  Tableau tab(m, N);
  std::vector<double> flip(m, 1.0);
  std::size_t slack = nstruct;
  for (std::size_t i = 0; i < m0; ++i) {
    const auto& row = lp.rows[i];
    double b = row.rhs;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = row.coeffs[j];
      if (a == 0.0) continue;
      b -= a * vmap[j].offset;
      for (auto [c, k] : vmap[j].cols) tab.at(i, c) += a * k;
    }
    if (row.sense == RowSense::Le) tab.at(i, slack++) = 1.0;
    if (row.sense == RowSense::Ge) tab.at(i, slack++) = -1.0;
    tab.rhs(i) = b;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const std::size_t i = m0 + k;
    tab.at(i, bound_rows[k].first) = 1.0;
    tab.at(i, slack++) = 1.0;
    tab.rhs(i) = bound_rows[k].second;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.rhs(i) < 0.0) {
      flip[i] = -1.0;
      for (std::size_t c = 0; c <= N; ++c) tab.at(i, c) = -tab.at(i, c);
    }
    tab.at(i, art0 + i) = 1.0;
    tab.basis_[i] = art0 + i;
  }

  const std::size_t cap = 10 * (m + N) * (m + N);
  Engine eng{std::move(tab), art0, 0, cap};

  // Phase I
  std::vector<double> c1(N, 0.0);
  for (std::size_t k = 0; k < nart; ++k) c1[art0 + k] = 1.0;
  eng.tab.price(c1);
  eng.run();  // phase I is bounded below by 0
  const double infeas = -eng.tab.at(m, N);

  auto finish = [&](Outcome out) -> Outcome {
    if (stats) stats->pivots = eng.pivots;
    if (!verify_certificate(lp, out)) throw NumericalFailure(std::string("certificate check failed for ") + outcome_name(out));
    return out;
  };

  if (infeas > kFeasTol) {
    // row multipliers of the phase I dual, u_k = 1 - d_art_k
    std::vector<double> y(m0);
    for (std::size_t i = 0; i < m0; ++i) {
      const double u = 1.0 - eng.tab.cost(art0 + i);
      const double v = u * flip[i];
      const double s = lp.rows[i].sense == RowSense::Ge ? -1.0 : 1.0;
      y[i] = -v * s;
    }
    normalize_max_abs(y);
    for (std::size_t i = 0; i < m0; ++i)
      if (lp.rows[i].sense != RowSense::Eq && y[i] < 0.0 && y[i] > -1e-12) y[i] = 0.0;
    return finish(Infeasible{std::move(y)});
  }

  // drive remaining artificials out of the basis where possible
  for (std::size_t r = 0; r < m; ++r) {
    if (eng.tab.basis_[r] < art0) continue;
    std::size_t best = art0;
    double mag = kPivotTol;
    for (std::size_t j = 0; j < art0; ++j) {
      if (std::abs(eng.tab.at(r, j)) > mag) {
        mag = std::abs(eng.tab.at(r, j));
        best = j;
      }
    }
    if (best < art0) eng.tab.pivot(r, best);
  }

  // Phase II
  std::vector<double> c2(N, 0.0);
  double cconst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double cj = osign * lp.objective[j];
    cconst += cj * vmap[j].offset;
    for (auto [c, k] : vmap[j].cols) c2[c] += cj * k;
  }
  eng.tab.price(c2);
  const PhaseResult res = eng.run();

  if (res == PhaseResult::Unbounded) {
    std::vector<double> dstd(N, 0.0);
    dstd[eng.unbounded_col] = 1.0;
    for (std::size_t r = 0; r < m; ++r) dstd[eng.tab.basis_[r]] = -eng.tab.at(r, eng.unbounded_col);
    std::vector<double> ray(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (auto [c, k] : vmap[j].cols) ray[j] += k * dstd[c];
    normalize_max_abs(ray);
    return finish(Unbounded{std::move(ray)});
  }

  std::vector<double> ystd(N, 0.0);
  for (std::size_t r = 0; r < m; ++r) ystd[eng.tab.basis_[r]] = std::max(0.0, eng.tab.rhs(r));
  Optimal opt;
  opt.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = vmap[j].offset;
    for (auto [c, k] : vmap[j].cols) v += k * ystd[c];
    opt.x[j] = std::clamp(v, lp.lo[j], lp.hi[j]);
  }
  opt.duals.assign(m0, 0.0);
  for (std::size_t i = 0; i < m0; ++i) {
    const double u = -eng.tab.cost(art0 + i);
    opt.duals[i] = osign * u * flip[i];
  }
  opt.reduced_costs.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double r = lp.objective[j];
    for (std::size_t i = 0; i < m0; ++i) r -= lp.rows[i].coeffs[j] * opt.duals[i];
    opt.reduced_costs[j] = r;
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * opt.x[j];
  opt.objective = obj;
  (void)cconst;
  return finish(std::move(opt));
}

namespace {

bool verify_optimal(const LinearProgram& lp, const Optimal& o) {
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  if (o.x.size() != n || o.duals.size() != m || o.reduced_costs.size() != n) return false;
  const double s = lp.sense == Sense::Max ? -1.0 : 1.0;  // view as min problem
  double cx = 0.0;
  double cmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(o.x[j])) return false;
    if (o.x[j] < lp.lo[j] - kFeasTol * (1 + std::abs(lp.lo[j]))) return false;
    if (o.x[j] > lp.hi[j] + kFeasTol * (1 + std::abs(lp.hi[j]))) return false;
    cx += lp.objective[j] * o.x[j];
    cmax = std::max(cmax, std::abs(lp.objective[j]));
  }
  if (std::abs(cx - o.objective) > 1e-6 * (1 + std::abs(cx))) return false;
  double ymax = 0.0;
  for (double y : o.duals) ymax = std::max(ymax, std::abs(y));
  const double dtol = kFeasTol * (1 + cmax + ymax);
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) ax += row.coeffs[j] * o.x[j];
    const double sc = row_scale(row.coeffs, o.x, row.rhs);
    const double resid = ax - row.rhs;
    const double y = s * o.duals[i];
    switch (row.sense) {
      case RowSense::Le:
        if (resid > kFeasTol * sc || y > dtol) return false;
        break;
      case RowSense::Ge:
        if (resid < -kFeasTol * sc || y < -dtol) return false;
        break;
      case RowSense::Eq:
        if (std::abs(resid) > kFeasTol * sc) return false;
        break;
    }
    if (std::abs(y * resid) > 1e-6 * (1 + std::abs(y)) * sc) return false;
    dual_obj += y * row.rhs;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double r = lp.objective[j];
    for (std::size_t i = 0; i < m; ++i) r -= lp.rows[i].coeffs[j] * o.duals[i];
    if (std::abs(r - o.reduced_costs[j]) > 1e-6 * (1 + std::abs(r))) return false;
    r *= s;
    if (std::abs(r) <= dtol) {
      dual_obj += r * o.x[j];
      continue;
    }
    const double bound = r > 0 ? lp.lo[j] : lp.hi[j];
    if (!std::isfinite(bound)) return false;
    dual_obj += r * bound;
  }
  return std::abs(s * cx - dual_obj) <= 1e-6 * (1 + std::abs(cx));
}

bool verify_infeasible(const LinearProgram& lp, const Infeasible& f) {
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  if (f.farkas.size() != m) return false;
  double ymax = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = f.farkas[i];
    if (!std::isfinite(y)) return false;
    if (lp.rows[i].sense != RowSense::Eq && y < 0.0) return false;
    ymax = std::max(ymax, std::abs(y));
  }
  if (ymax == 0.0) return false;
  std::vector<double> g(n, 0.0);
  double h = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const double ys = f.farkas[i] * (row.sense == RowSense::Ge ? -1.0 : 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      g[j] += ys * row.coeffs[j];
      scale = std::max(scale, std::abs(ys * row.coeffs[j]));
    }
    h += ys * row.rhs;
  }
  const double eps = 1e-9 * (1 + scale);
  double gmin = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(g[j]) <= eps) {
      if (std::isfinite(lp.lo[j])) gmin += g[j] * lp.lo[j];
      else if (std::isfinite(lp.hi[j])) gmin += g[j] * lp.hi[j];
      continue;
    }
    const double b = g[j] > 0 ? lp.lo[j] : lp.hi[j];
    if (!std::isfinite(b)) return false;
    gmin += g[j] * b;
  }
  return gmin - h > kFeasTol;
}

bool verify_unbounded(const LinearProgram& lp, const Unbounded& u) {
  const std::size_t n = lp.num_vars();
  if (u.ray.size() != n) return false;
  double dmax = 0.0;
  for (double d : u.ray) {
    if (!std::isfinite(d)) return false;
    dmax = std::max(dmax, std::abs(d));
  }
  if (dmax <= kFeasTol) return false;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.lo[j]) && u.ray[j] < -kFeasTol * dmax) return false;
    if (std::isfinite(lp.hi[j]) && u.ray[j] > kFeasTol * dmax) return false;
  }
  for (const auto& row : lp.rows) {
    double ad = 0.0;
    double sc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      ad += row.coeffs[j] * u.ray[j];
      sc += std::abs(row.coeffs[j] * u.ray[j]);
    }
    const double tol = kFeasTol * (1 + sc);
    if (row.sense == RowSense::Le && ad > tol) return false;
    if (row.sense == RowSense::Ge && ad < -tol) return false;
    if (row.sense == RowSense::Eq && std::abs(ad) > tol) return false;
  }
  double cd = 0.0;
  for (std::size_t j = 0; j < n; ++j) cd += lp.objective[j] * u.ray[j];
  return lp.sense == Sense::Min ? cd < -kFeasTol : cd > kFeasTol;
}

}  // namespace

bool verify_certificate(const LinearProgram& lp, const Outcome& outcome) {
  try {
    lp.validate();
  } catch (const std::invalid_argument&) {
    return false;
  }
  return std::visit(
      [&](const auto& o) -> bool {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Optimal>) return verify_optimal(lp, o);
        else if constexpr (std::is_same_v<T, Infeasible>) return verify_infeasible(lp, o);
        else return verify_unbounded(lp, o);
      },
      outcome);
}

const char* outcome_name(const Outcome& o) {
  switch (o.index()) {
    case 0: return "optimal";
    case 1: return "infeasible";
    default: return "unbounded";
  }
}

}  // namespace ddbd::lp
