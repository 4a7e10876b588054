#include <cmath>

#include <spdlog/spdlog.h>

#include "ddbd/ucp.hpp"

namespace ddbd::ucp {

namespace {

using lp::RowSense;

std::size_t p_idx(const Instance& inst, std::size_t i, int j) { return 2 * inst.var(i, j); }
std::size_t pbar_idx(const Instance& inst, std::size_t i, int j) { return 2 * inst.var(i, j) + 1; }

double x_at(const Instance& inst, const std::vector<double>& x, std::size_t i, int j) {
  return j < 1 ? 0.0 : x.at(inst.var(i, j));
}

void check_args(const Instance& inst, const std::vector<double>& x, std::size_t scenario) {
  if (x.size() != inst.num_vars()) throw std::invalid_argument("schedule length mismatch");
  if (scenario >= inst.scenarios.size()) throw std::out_of_range("scenario index out of range");
}

// shared second stage; ramp_rhs gives the right-hand sides of the up and down ramp rows
template <class RampRhs>
lp::LinearProgram second_stage(const Instance& inst, const std::vector<double>& x, std::size_t scenario,
                               RampRhs ramp_rhs) {
  check_args(inst, x, scenario);
  const std::size_t nv = 2 * inst.num_vars();
  lp::LinearProgram prog(nv, lp::Sense::Min);
  const auto& sc = inst.scenarios[scenario];
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const auto& g = inst.generators[i];
    for (int j = 1; j <= inst.T; ++j) {
      prog.objective[p_idx(inst, i, j)] = g.c_g;
      const double xj = x_at(inst, x, i, j);
      const auto [up, down] = ramp_rhs(g, x_at(inst, x, i, j - 1), xj);
      std::vector<double> row(nv, 0.0);
      row[p_idx(inst, i, j)] = 1.0;
      if (j > 1) row[p_idx(inst, i, j - 1)] = -1.0;
      prog.add_row(row, RowSense::Le, up);
      for (auto& v : row) v = -v;
      prog.add_row(row, RowSense::Le, down);
      std::vector<double> a(nv, 0.0);
      a[p_idx(inst, i, j)] = 1.0;
      prog.add_row(a, RowSense::Ge, g.m * xj);
      a[pbar_idx(inst, i, j)] = -1.0;
      prog.add_row(a, RowSense::Le, 0.0);
      a[p_idx(inst, i, j)] = 0.0;
      a[pbar_idx(inst, i, j)] = 1.0;
      prog.add_row(a, RowSense::Le, g.M * xj);
    }
  }
  for (int j = 1; j <= inst.T; ++j) {
    std::vector<double> dem(nv, 0.0), res(nv, 0.0);
    for (std::size_t i = 0; i < inst.n(); ++i) {
      dem[p_idx(inst, i, j)] = 1.0;
      res[pbar_idx(inst, i, j)] = 1.0;
    }
    prog.add_row(dem, RowSense::Ge, sc.D[j - 1]);
    prog.add_row(res, RowSense::Ge, sc.D[j - 1] + sc.R[j - 1]);
  }
  return prog;
}

}  // namespace

lp::LinearProgram build_subproblem(const Instance& inst, const std::vector<double>& x, std::size_t scenario) {
  return second_stage(inst, x, scenario, [](const Generator& g, double prev, double now) {
    return std::pair{(g.RU - g.SU) * prev + g.SU * now, (g.RD - g.SD) * now + g.SD * prev};
  });
}

lp::LinearProgram build_subproblem_classic(const Instance& inst, const std::vector<double>& x, std::size_t scenario) {
  return second_stage(inst, x, scenario, [](const Generator& g, double prev, double now) {
    const double y = std::max(0.0, now - prev), ybar = std::max(0.0, prev - now);
    return std::pair{g.RU * prev + g.SU * y, g.RD * now + g.SD * ybar};
  });
}

lp::LinearProgram build_dual(const Instance& inst, const std::vector<double>& x, std::size_t scenario) {
  check_args(inst, x, scenario);
  const std::size_t T = static_cast<std::size_t>(inst.T);
  const DualLayout L{T, inst.n()};
  lp::LinearProgram prog(L.size(), lp::Sense::Max);
  const auto& sc = inst.scenarios[scenario];
  for (std::size_t j = 1; j <= T; ++j) {
    prog.objective[L.psi(j)] = sc.D[j - 1];
    prog.objective[L.beta(j)] = sc.D[j - 1] + sc.R[j - 1];
  }
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const auto& g = inst.generators[i];
    for (std::size_t j = 1; j <= T; ++j) {
      const int jj = static_cast<int>(j);
      const double xj = x_at(inst, x, i, jj), xp = x_at(inst, x, i, jj - 1);
      prog.objective[L.phi(i, j)] = g.m * xj;
      prog.objective[L.pi(i, j)] = -g.M * xj;
      prog.objective[L.gamma(i, j)] = (g.SU - g.RU) * xp - g.SU * xj;
      prog.objective[L.delta(i, j)] = (g.SD - g.RD) * xj - g.SD * xp;
      // column of the output variable
      std::vector<double> row(L.size(), 0.0);
      row[L.psi(j)] = 1.0;
      row[L.gamma(i, j)] = -1.0;
      row[L.delta(i, j)] = 1.0;
      if (j < T) {
        row[L.gamma(i, j + 1)] = 1.0;
        row[L.delta(i, j + 1)] = -1.0;
      }
      row[L.phi(i, j)] = 1.0;
      row[L.eta(i, j)] = -1.0;
      prog.add_row(row, RowSense::Le, g.c_g);
      // column of the committed-capacity variable
      std::vector<double> cap(L.size(), 0.0);
      cap[L.beta(j)] = 1.0;
      cap[L.eta(i, j)] = 1.0;
      cap[L.pi(i, j)] = -1.0;
      prog.add_row(cap, RowSense::Le, 0.0);
    }
  }
  return prog;
}

AffineForm dual_affine(const Instance& inst, std::size_t scenario, const std::vector<double>& u) {
  const std::size_t T = static_cast<std::size_t>(inst.T);
  const DualLayout L{T, inst.n()};
  if (u.size() != L.size()) throw std::invalid_argument("dual vector has the wrong length");
  const auto& sc = inst.scenarios.at(scenario);
  AffineForm f;
  f.coeffs.assign(inst.num_vars(), 0.0);
  for (std::size_t j = 1; j <= T; ++j) f.constant += sc.D[j - 1] * u[L.psi(j)] + (sc.D[j - 1] + sc.R[j - 1]) * u[L.beta(j)];
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const auto& g = inst.generators[i];
    for (std::size_t j = 1; j <= T; ++j) {
      double c = g.m * u[L.phi(i, j)] - g.M * u[L.pi(i, j)] - g.SU * u[L.gamma(i, j)] + (g.SD - g.RD) * u[L.delta(i, j)];
      if (j < T) c += (g.SU - g.RU) * u[L.gamma(i, j + 1)] - g.SD * u[L.delta(i, j + 1)];
      f.coeffs[inst.var(i, static_cast<int>(j))] = c;
    }
  }
  return f;
}

SubproblemEvaluation evaluate_subproblems(const Instance& inst, const std::vector<double>& x) {
  SubproblemEvaluation ev;
  AffineForm agg;
  agg.coeffs.assign(inst.num_vars(), 0.0);
  double expected = 0.0;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto out = lp::solve(build_dual(inst, x, s));
    ++ev.lp_calls;
    if (const auto* ray = std::get_if<lp::Unbounded>(&out)) {
      const auto f = dual_affine(inst, s, ray->ray);
      dd::CutRow c;
      for (std::size_t k = 0; k < f.coeffs.size(); ++k) c.coeffs[k] = f.coeffs[k];
      c.rhs = -f.constant;
      c.sense = dd::CutSense::Le;
      c = benders::normalize_cut(c);
      if (c.satisfied_by(x)) spdlog::warn("feasibility cut of scenario {} does not separate the schedule", s);
      ev.cuts.push_back(c);
      ev.infeasible_scenarios.push_back(s);
      continue;
    }
    const auto* opt = std::get_if<lp::Optimal>(&out);
    if (!opt) throw std::runtime_error("dual second stage infeasible; production costs must be non-negative");
    const double p = inst.scenarios[s].prob;
    const auto f = dual_affine(inst, s, opt->x);
    expected += p * opt->objective;
    agg.constant += p * f.constant;
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) agg.coeffs[k] += p * f.coeffs[k];
  }
  if (!ev.infeasible_scenarios.empty()) return ev;
  ev.feasible = true;
  ev.value = expected;
  // z >= constant + coeffs x
  dd::CutRow c;
  for (std::size_t k = 0; k < agg.coeffs.size(); ++k) c.coeffs[k] = -agg.coeffs[k];
  c.z_coeff = 1.0;
  c.rhs = agg.constant;
  c.sense = dd::CutSense::Ge;
  ev.cuts.push_back(benders::normalize_cut(c));
  return ev;
}

GammaBounds compute_gamma(const Instance& inst) {
  const std::size_t nT = inst.num_vars();
  const std::size_t nv = 5 * nT;
  auto X = [&](std::size_t i, int j) { return 5 * inst.var(i, j); };
  GammaBounds out;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto& sc = inst.scenarios[s];
    lp::LinearProgram prog(0, lp::Sense::Min);
    for (std::size_t k = 0; k < nT; ++k) {
      const auto& g = inst.generators[k / static_cast<std::size_t>(inst.T)];
      prog.add_var(0.0, 0.0, 1.0);  // x
      prog.add_var(0.0, 0.0, 1.0);  // start-up
      prog.add_var(0.0, 0.0, 1.0);  // shut-down
      prog.add_var(g.c_g);          // output
      prog.add_var(0.0);            // committed capacity
    }
    for (std::size_t i = 0; i < inst.n(); ++i) {
      const auto& g = inst.generators[i];
      for (int j = 1; j <= inst.T; ++j) {
        const std::size_t b = X(i, j);
        std::vector<double> r(nv, 0.0);
        r[b + 1] = 1;
        r[b + 2] = -1;
        r[b] = -1;
        if (j > 1) r[X(i, j - 1)] = 1;
        prog.add_row(r, RowSense::Eq, 0.0);
        std::vector<double> up(nv, 0.0), dn(nv, 0.0);
        for (int h = std::max(1, j - g.L + 1); h <= j; ++h) up[X(i, h) + 1] = 1;
        up[b] -= 1;
        prog.add_row(up, RowSense::Le, 0.0);
        for (int h = std::max(1, j - g.l + 1); h <= j; ++h) dn[X(i, h) + 2] = 1;
        dn[b] += 1;
        prog.add_row(dn, RowSense::Le, 1.0);
        std::vector<double> ru(nv, 0.0), rd(nv, 0.0);
        ru[b + 3] = 1;
        ru[b + 1] = -g.SU;
        rd[b + 3] = -1;
        rd[b] = -g.RD;
        rd[b + 2] = -g.SD;
        if (j > 1) {
          ru[X(i, j - 1) + 3] = -1;
          ru[X(i, j - 1)] = -g.RU;
          rd[X(i, j - 1) + 3] = 1;
        }
        prog.add_row(ru, RowSense::Le, 0.0);
        prog.add_row(rd, RowSense::Le, 0.0);
        std::vector<double> lo(nv, 0.0), mid(nv, 0.0), hi(nv, 0.0);
        lo[b + 3] = 1;
        lo[b] = -g.m;
        prog.add_row(lo, RowSense::Ge, 0.0);
        mid[b + 3] = 1;
        mid[b + 4] = -1;
        prog.add_row(mid, RowSense::Le, 0.0);
        hi[b + 4] = 1;
        hi[b] = -g.M;
        prog.add_row(hi, RowSense::Le, 0.0);
      }
    }
    for (int j = 1; j <= inst.T; ++j) {
      std::vector<double> dem(nv, 0.0), res(nv, 0.0);
      for (std::size_t i = 0; i < inst.n(); ++i) {
        dem[X(i, j) + 3] = 1;
        res[X(i, j) + 4] = 1;
      }
      prog.add_row(dem, RowSense::Ge, sc.D[j - 1]);
      prog.add_row(res, RowSense::Ge, sc.D[j - 1] + sc.R[j - 1]);
    }
    double vals[2];
    for (int pass = 0; pass < 2; ++pass) {
      prog.sense = pass == 0 ? lp::Sense::Min : lp::Sense::Max;
      const auto res = lp::solve(prog);
      const auto* opt = std::get_if<lp::Optimal>(&res);
      if (!opt) {
        // no relaxed schedule meets this scenario, so no schedule does
        return {0.0, 0.0, false};
      }
      vals[pass] = opt->objective;
    }
    out.lo += sc.prob * vals[0];
    out.hi += sc.prob * vals[1];
  }
  return out;
}

UcpMaster::UcpMaster(Instance inst) : inst_(std::move(inst)) {
  validate(inst_);
  gamma_ = compute_gamma(inst_);
}

benders::BuiltDiagram UcpMaster::build_exact(const PartialAssignment& partial) const {
  return {build_master_dd(inst_, partial, gamma_), true};
}

benders::BuiltDiagram UcpMaster::build_restricted(const PartialAssignment& partial, std::size_t width) const {
  return build_restricted_master_dd(inst_, partial, gamma_, width);
}

benders::BuiltDiagram UcpMaster::build_relaxed(const PartialAssignment& partial, std::size_t width) const {
  return build_relaxed_master_dd(inst_, partial, gamma_, width);
}

benders::SubproblemResult UcpSubproblem::evaluate(const std::vector<double>& x) const {
  auto ev = evaluate_subproblems(inst_, x);
  return {ev.feasible, ev.value, std::move(ev.cuts), ev.lp_calls};
}

}  // namespace ddbd::ucp
