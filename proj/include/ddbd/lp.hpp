#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ddbd::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kReducedCostTol = 1e-9;
inline constexpr double kPivotTol = 1e-9;

enum class Sense { Min, Max };
enum class RowSense { Le, Eq, Ge };

struct Row {
  std::vector<double> coeffs;
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
};

struct LinearProgram {
  Sense sense = Sense::Min;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lo;
  std::vector<double> hi;

  // n variables with bounds [0, +inf)
  explicit LinearProgram(std::size_t n = 0, Sense s = Sense::Min);
  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }
  std::size_t add_var(double cost, double lower = 0.0, double upper = kInf);
  std::size_t add_row(std::vector<double> coeffs, RowSense sense, double rhs);
  // throws std::invalid_argument when shapes or entries are bad
  void validate() const;
};

// duals are shadow prices d(objective)/d(rhs); reduced = c - A^T y
struct Optimal {
  std::vector<double> x;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double objective = 0.0;
};

// Multipliers y >= 0 on inequality rows (free on equalities). Rows are
// aggregated in <= orientation: sum_i y_i s_i a_i x <= sum_i y_i s_i b_i with
// s_i = -1 for >= rows, and that inequality has no solution inside the bounds.
struct Infeasible {
  std::vector<double> farkas;
};

struct Unbounded {
  std::vector<double> ray;
};

using Outcome = std::variant<Optimal, Infeasible, Unbounded>;

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveStats {
  std::size_t pivots = 0;
};

Outcome solve(const LinearProgram& lp, SolveStats* stats = nullptr);

bool verify_certificate(const LinearProgram& lp, const Outcome& outcome);

// Text fixture format, one directive per line, '#' starts a comment:
//   min|max c1 c2 ... cn
//   row a1 ... an <=|=|>= b
//   bounds j lo hi          (inf / -inf allowed)
LinearProgram parse_lp_text(std::istream& in);
std::string to_lp_text(const LinearProgram& lp);

const char* outcome_name(const Outcome& o);

}  // namespace ddbd::lp
