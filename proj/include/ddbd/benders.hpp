#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ddbd/decision_diagram.hpp"
#include "json.hpp"

namespace ddbd::benders {

using dd::CutRow;
using dd::Sense;
using PartialAssignment = std::vector<double>;

inline constexpr double kConvergenceTol = 1e-6;

class PropertyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exact == true when no node was dropped or merged while compiling
struct BuiltDiagram {
  dd::DecisionDiagram dd;
  bool exact = true;
};

class MasterOracle {
 public:
  virtual ~MasterOracle() = default;
  virtual Sense sense() const = 0;
  virtual std::size_t num_vars() const = 0;
  // Each build throws dd::EmptyDiagram when no completion of the partial exists.
  virtual BuiltDiagram build_exact(const PartialAssignment& partial) const = 0;
  virtual BuiltDiagram build_restricted(const PartialAssignment& partial, std::size_t width) const = 0;
  virtual BuiltDiagram build_relaxed(const PartialAssignment& partial, std::size_t width) const = 0;
  // objective of x without the z term
  virtual double master_cost(const std::vector<double>& x) const = 0;
};

struct SubproblemResult {
  bool feasible = false;
  double value = 0.0;  // expected second-stage value when feasible
  std::vector<CutRow> cuts;
  std::size_t lp_calls = 0;
};

class SubproblemOracle {
 public:
  virtual ~SubproblemOracle() = default;
  virtual SubproblemResult evaluate(const std::vector<double>& x) const = 0;
};

class CutPool {
 public:
  // false when an equal cut (coefficients rounded to 1e-9) is already pooled
  bool add(const CutRow& cut);
  const std::vector<CutRow>& cuts() const { return cuts_; }
  std::size_t size() const { return cuts_.size(); }

 private:
  using Key = std::tuple<std::vector<std::pair<std::size_t, std::int64_t>>, std::int64_t, std::int64_t, int>;
  static Key key_of(const CutRow& c);
  std::vector<CutRow> cuts_;
  std::set<Key> keys_;
};

// Replays cuts by exact refinement; throws dd::InfeasibleDiagram if emptied.
dd::DecisionDiagram apply_cuts(dd::DecisionDiagram d, const std::vector<CutRow>& cuts);

struct ExactCutset {
  std::size_t layer = 0;  // node layer index, equal to the prefix length
  std::vector<std::size_t> nodes;
};
ExactCutset exact_cutset(const dd::DecisionDiagram& d);

// Appendix reward propagation over a tree-shaped diagram with optimality cuts
// of the form z <= alpha x + alpha0.
double cost_tuple_reward(const dd::DecisionDiagram& d, const std::vector<CutRow>& cuts);

enum class BranchPrefixes { LongestOnly, All };

enum class BoundKind { Restricted, Relaxed };
struct BoundEvent {
  BoundKind kind;
  PartialAssignment partial;
  double value;
  std::vector<double> x;
};

struct EngineConfig {
  std::size_t width = 2;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  bool relaxed_cuts = true;
  std::size_t relaxed_cut_cap = 20;
  bool skip_relaxed_when_exact = true;
  BranchPrefixes branch_prefixes = BranchPrefixes::LongestOnly;
  std::size_t max_repeat_iterations = 100000;
  std::function<void(const BoundEvent&)> observer;
  // called with a tag and the diagram after each refinement step
  std::function<void(const std::string&, const dd::DecisionDiagram&)> diagram_hook;
};

enum class SolveStatus { Optimal, Infeasible, TimeLimit };
const char* status_name(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;
  double z = 0.0;
  double value = 0.0;
  std::size_t feasibility_cuts = 0;
  std::size_t optimality_cuts = 0;
  std::size_t branches = 0;
  std::size_t lp_calls = 0;
  std::size_t nodes_explored = 0;
  std::size_t width_cap = 0;
  double seconds = 0.0;
  std::vector<CutRow> cuts;
};

SolveReport dd_bd_solve(const MasterOracle& master, const SubproblemOracle& sub, const EngineConfig& config);

inline constexpr int kReportVersion = 1;
nlohmann::json report_to_json(const SolveReport& r, const std::string& instance_id);
std::string csv_header();
std::string csv_row(const SolveReport& r, const std::string& instance_id, const std::string& method);

// Master over an explicit list of binary points with a linear objective and
// z in [z_lo, z_hi]; the diagram is the reduced trie of the points.
class PointSetMaster : public MasterOracle {
 public:
  PointSetMaster(Sense sense, std::vector<double> objective, std::vector<std::vector<double>> points, double z_lo,
                 double z_hi);
  Sense sense() const override { return sense_; }
  std::size_t num_vars() const override { return objective_.size(); }
  BuiltDiagram build_exact(const PartialAssignment& partial) const override;
  BuiltDiagram build_restricted(const PartialAssignment& partial, std::size_t width) const override;
  BuiltDiagram build_relaxed(const PartialAssignment& partial, std::size_t width) const override;
  double master_cost(const std::vector<double>& x) const override;
  const std::vector<std::vector<double>>& points() const { return points_; }

 private:
  Sense sense_;
  std::vector<double> objective_;
  std::vector<std::vector<double>> points_;
  double z_lo_, z_hi_;
};

// Second stage: optimize q y subject to W y (sense) h - T x, y >= 0; cuts come
// from the LP dual solved directly.
struct TwoStageRow {
  std::vector<double> w;
  std::vector<double> t;
  lp::RowSense sense = lp::RowSense::Le;
  double h = 0.0;
};

struct TwoStageLinear {
  Sense sense = Sense::Max;
  std::vector<double> q;
  std::vector<TwoStageRow> rows;
};

class LinearSubproblem : public SubproblemOracle {
 public:
  explicit LinearSubproblem(TwoStageLinear model);
  SubproblemResult evaluate(const std::vector<double>& x) const override;
  lp::LinearProgram primal(const std::vector<double>& x) const;
  lp::LinearProgram dual(const std::vector<double>& x) const;

 private:
  TwoStageLinear m_;
};

// Feasibility cuts get largest |x coefficient| 1 (|rhs| when all vanish);
// optimality cuts get |z coefficient| 1. Near-zero coefficients are dropped.
CutRow normalize_cut(CutRow c);

}  // namespace ddbd::benders
