#include <chrono>
#include <limits>
#include <cmath>
#include <ostream>
#include <set>

#include "ddbd/oracle.hpp"

namespace ddbd::oracle {

using dd::Sense;

namespace {

bool improves(Sense s, double v, double best) {
  const double tol = 1e-9 * (1.0 + std::abs(best));
  return s == Sense::Max ? v > best + tol : v < best - tol;
}

void take(OracleResult& r, Sense s, const TableRow& row) {
  if (!row.feasible) return;
  if (!r.feasible || improves(s, row.total, r.best_cost)) {
    r.feasible = true;
    r.best_cost = row.total;
    r.best_x = row.x;
  }
}

}  // namespace

TableRow evaluate_schedule(const ucp::Instance& inst, const std::vector<double>& x) {
  TableRow row;
  row.x = x;
  row.master_cost = ucp::master_objective(inst, x);
  row.feasible = true;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const auto out = lp::solve(ucp::build_subproblem(inst, x, s));
    const auto* opt = std::get_if<lp::Optimal>(&out);
    if (!opt) {
      row.feasible = false;
      row.second_stage = 0.0;
      break;
    }
    row.second_stage += inst.scenarios[s].prob * opt->objective;
  }
  row.total = row.master_cost + row.second_stage;
  return row;
}

OracleResult brute_force_solve(const ucp::Instance& inst) {
  ucp::validate(inst);
  const std::size_t nv = inst.num_vars();
  if (nv > kMaxEnumeratedVars)
    throw TooLarge("brute force limited to " + std::to_string(kMaxEnumeratedVars) + " binary variables");
  OracleResult r;
  std::vector<double> x(nv);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << nv); ++code) {
    // first variable is the most significant bit, so codes run in lexicographic order
    for (std::size_t k = 0; k < nv; ++k) x[k] = static_cast<double>((code >> (nv - 1 - k)) & 1);
    if (!ucp::commitment_feasible(inst, x)) continue;
    r.table.push_back(evaluate_schedule(inst, x));
    take(r, Sense::Min, r.table.back());
  }
  return r;
}

OracleResult brute_force_two_stage(const benders::PointSetMaster& master, const benders::LinearSubproblem& sub) {
  OracleResult r;
  for (const auto& x : master.points()) {
    TableRow row;
    row.x = x;
    row.master_cost = master.master_cost(x);
    const auto out = lp::solve(sub.primal(x));
    if (const auto* opt = std::get_if<lp::Optimal>(&out)) {
      row.feasible = true;
      row.second_stage = opt->objective;
    }
    row.total = row.master_cost + row.second_stage;
    r.table.push_back(row);
    take(r, master.sense(), row);
  }
  return r;
}

void write_table_csv(const OracleResult& r, std::ostream& out) {
  out << "x,feasible,master_cost,second_stage,total\n";
  for (const auto& row : r.table) {
    for (double v : row.x) out << static_cast<int>(v);
    out << ',' << (row.feasible ? 1 : 0) << ',' << row.master_cost << ',';
    if (row.feasible) out << row.second_stage << ',' << row.total;
    else out << ',';
    out << '\n';
  }
}

benders::SolveReport naive_benders(const benders::MasterOracle& master, const benders::SubproblemOracle& sub,
                                   double time_limit_seconds) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const Sense sense = master.sense();
  benders::SolveReport rep;
  rep.width_cap = 0;
  dd::DecisionDiagram exact;
  try {
    exact = master.build_exact({}).dd;
  } catch (const dd::EmptyDiagram&) {
    rep.status = benders::SolveStatus::Infeasible;
    return rep;
  }
  double z_lo = std::numeric_limits<double>::infinity(), z_hi = -z_lo;
  for (const auto& a : exact.arcs(exact.num_arc_layers() - 1)) {
    z_lo = std::min(z_lo, a.label.lo);
    z_hi = std::max(z_hi, a.label.hi);
  }
  std::set<std::vector<double>> points;
  for (auto s : dd::enumerate_solutions(exact)) {
    s.pop_back();
    points.insert(s);
  }
  benders::CutPool pool;
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  for (;;) {
    if (elapsed() > time_limit_seconds) {
      rep.status = benders::SolveStatus::TimeLimit;
      break;
    }
    // master: best point under the pooled cuts
    bool found = false;
    double best = 0.0, best_z = 0.0;
    std::vector<double> best_x;
    for (const auto& x : points) {
      double lo = z_lo, hi = z_hi;
      bool ok = true;
      for (const auto& c : pool.cuts()) {
        const double lhs = c.lhs_x(x);
        if (c.is_feasibility()) {
          ok = c.satisfied_by(x);
        } else {
          const double b = (c.rhs - lhs) / c.z_coeff;
          const bool upper = (c.z_coeff > 0) == (c.sense == dd::CutSense::Le);
          (upper ? hi : lo) = upper ? std::min(hi, b) : std::max(lo, b);
        }
        if (!ok) break;
      }
      if (!ok || lo > hi + dd::kCutTol) continue;
      const double z = sense == Sense::Max ? hi : std::min(lo, hi);
      const double v = master.master_cost(x) + z;
      if (!found || improves(sense, v, best)) {
        found = true;
        best = v;
        best_z = z;
        best_x = x;
      }
    }
    if (!found) {
      rep.status = benders::SolveStatus::Infeasible;
      break;
    }
    const auto r = sub.evaluate(best_x);
    rep.lp_calls += r.lp_calls;
    bool fresh = false;
    for (const auto& c : r.cuts) {
      if (!pool.add(c)) continue;
      fresh = true;
      (c.is_feasibility() ? rep.feasibility_cuts : rep.optimality_cuts) += 1;
    }
    if (r.feasible && (std::abs(best_z - r.value) <= benders::kConvergenceTol || !fresh)) {
      rep.status = benders::SolveStatus::Optimal;
      rep.x = best_x;
      rep.z = r.value;
      rep.value = master.master_cost(best_x) + r.value;
      break;
    }
    if (!fresh) throw std::runtime_error("naive Benders stalled on an infeasible point without a new cut");
  }
  rep.cuts = pool.cuts();
  rep.seconds = elapsed();
  return rep;
}

}  // namespace ddbd::oracle
