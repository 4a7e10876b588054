#include <cmath>

#include <spdlog/spdlog.h>

#include "ddbd/benders.hpp"

namespace ddbd::benders {

LinearSubproblem::LinearSubproblem(TwoStageLinear model) : m_(std::move(model)) {
  if (m_.rows.empty()) throw std::invalid_argument("second stage without rows");
  const std::size_t ny = m_.q.size();
  const std::size_t nx = m_.rows.front().t.size();
  for (const auto& r : m_.rows)
    if (r.w.size() != ny || r.t.size() != nx) throw std::invalid_argument("second-stage row has wrong length");
}

lp::LinearProgram LinearSubproblem::primal(const std::vector<double>& x) const {
  lp::LinearProgram p(m_.q.size(), m_.sense);
  p.objective = m_.q;
  for (const auto& r : m_.rows) {
    double rhs = r.h;
    for (std::size_t j = 0; j < r.t.size(); ++j) rhs -= r.t[j] * x.at(j);
    p.add_row(r.w, r.sense, rhs);
  }
  return p;
}

lp::LinearProgram LinearSubproblem::dual(const std::vector<double>& x) const {
  const bool min_primal = m_.sense == Sense::Min;
  lp::LinearProgram d(0, min_primal ? Sense::Max : Sense::Min);
  for (const auto& r : m_.rows) {
    double c = r.h;
    for (std::size_t j = 0; j < r.t.size(); ++j) c -= r.t[j] * x.at(j);
    // sign of the multiplier follows the row sense and the primal direction
    double lo = -lp::kInf, hi = lp::kInf;
    if (r.sense == lp::RowSense::Ge) (min_primal ? lo : hi) = 0.0;
    if (r.sense == lp::RowSense::Le) (min_primal ? hi : lo) = 0.0;
    d.add_var(c, lo, hi);
  }
  for (std::size_t k = 0; k < m_.q.size(); ++k) {
    std::vector<double> col;
    for (const auto& r : m_.rows) col.push_back(r.w[k]);
    d.add_row(std::move(col), min_primal ? lp::RowSense::Le : lp::RowSense::Ge, m_.q[k]);
  }
  return d;
}

SubproblemResult LinearSubproblem::evaluate(const std::vector<double>& x) const {
  const auto outcome = lp::solve(dual(x));
  SubproblemResult res;
  res.lp_calls = 1;
  const std::size_t nx = m_.rows.front().t.size();
  auto make_cut = [&](const std::vector<double>& u) {
    CutRow c;
    for (std::size_t j = 0; j < nx; ++j) {
      double a = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) a += u[i] * m_.rows[i].t[j];
      c.coeffs[j] = a;
    }
    for (std::size_t i = 0; i < u.size(); ++i) c.rhs += u[i] * m_.rows[i].h;
    return c;
  };
  if (const auto* opt = std::get_if<lp::Optimal>(&outcome)) {
    res.feasible = true;
    res.value = opt->objective;
    CutRow c = make_cut(opt->x);
    c.z_coeff = 1.0;
    c.sense = m_.sense == Sense::Min ? dd::CutSense::Ge : dd::CutSense::Le;
    res.cuts.push_back(normalize_cut(c));
  } else if (const auto* ray = std::get_if<lp::Unbounded>(&outcome)) {
    CutRow c = make_cut(ray->ray);
    c.sense = m_.sense == Sense::Min ? dd::CutSense::Ge : dd::CutSense::Le;
    c = normalize_cut(c);
    if (c.satisfied_by(x)) spdlog::warn("feasibility cut does not separate the evaluated point");
    res.cuts.push_back(c);
  } else {
    throw std::runtime_error("second stage is unbounded for some first-stage point");
  }
  return res;
}

}  // namespace ddbd::benders
