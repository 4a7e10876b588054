#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "ddbd/benders.hpp"
#include "ddbd/ucp.hpp"

namespace ddbd::oracle {

inline constexpr std::size_t kMaxEnumeratedVars = 24;

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TableRow {
  std::vector<double> x;
  bool feasible = false;
  double master_cost = 0.0;
  double second_stage = 0.0;  // expected, meaningful when feasible
  double total = 0.0;
};

struct OracleResult {
  bool feasible = false;
  std::vector<double> best_x;
  double best_cost = 0.0;
  std::vector<TableRow> table;  // one row per schedule that passes the commitment rules
};

// Enumerates every schedule in lexicographic order; ties keep the first.
OracleResult brute_force_solve(const ucp::Instance& inst);
// Recomputes one table row from scratch.
TableRow evaluate_schedule(const ucp::Instance& inst, const std::vector<double>& x);

OracleResult brute_force_two_stage(const benders::PointSetMaster& master, const benders::LinearSubproblem& sub);

void write_table_csv(const OracleResult& r, std::ostream& out);

// Textbook loop: the master is solved by scanning every point of the exact
// master diagram under the pooled cuts.
benders::SolveReport naive_benders(const benders::MasterOracle& master, const benders::SubproblemOracle& sub,
                                   double time_limit_seconds = 1e30);

}  // namespace ddbd::oracle
