#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ddbd/benders.hpp"
#include "ddbd/decision_diagram.hpp"
#include "ddbd/lp.hpp"
#include "json.hpp"

namespace ddbd::ucp {

using dd::Sense;
inline constexpr std::int64_t kInfPeriods = dd::kStateInfinity;
inline constexpr int kInstanceVersion = 1;

class InvalidInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Generator {
  double c_f = 0.0;  // fixed cost per committed period
  double c_g = 0.0;  // production cost per MW
  double m = 0.0, M = 0.0;
  int L = 1;     // min up periods
  int l = 1;     // min down periods
  double RU = 0.0, RD = 0.0, SU = 0.0, SD = 0.0;
  std::vector<double> K;  // K[k-1]: start-up cost after k down periods; last entry covers colder
  double K_inf = 0.0;     // start-up when down since the horizon start

  double startup_cost(std::int64_t down_periods) const;
};

struct Scenario {
  double prob = 1.0;
  std::vector<double> D;
  std::vector<double> R;
};

struct Instance {
  std::vector<Generator> generators;
  int T = 1;
  std::vector<Scenario> scenarios;

  std::size_t n() const { return generators.size(); }
  std::size_t num_vars() const { return generators.size() * static_cast<std::size_t>(T); }
  // master variable index of unit i in period j (1-based period)
  std::size_t var(std::size_t i, int j) const { return i * static_cast<std::size_t>(T) + static_cast<std::size_t>(j - 1); }
  double total_capacity() const;
};

// throws InvalidInstance naming the first broken rule
void validate(const Instance& inst);
nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& path);

// (s_plus, s_minus) in exact diagrams, plus s_eq in relaxed ones
struct MasterState {
  std::int64_t s_plus = kInfPeriods;
  std::int64_t s_minus = kInfPeriods;
  std::int64_t s_eq = kInfPeriods;

  bool down() const { return s_plus >= s_minus; }
  bool operator==(const MasterState&) const = default;
};
MasterState merge_states(const std::vector<MasterState>& states);

struct GammaBounds {
  double lo = 0.0;
  double hi = 0.0;
  bool relaxation_feasible = true;
};
GammaBounds compute_gamma(const Instance& inst);

using benders::PartialAssignment;

dd::DecisionDiagram build_master_dd(const Instance& inst, const PartialAssignment& partial, const GammaBounds& g);
// exact flag is false when some layer lost nodes
benders::BuiltDiagram build_restricted_master_dd(const Instance& inst, const PartialAssignment& partial,
                                                 const GammaBounds& g, std::size_t width);
// exact flag is false when some layer merged nodes
benders::BuiltDiagram build_relaxed_master_dd(const Instance& inst, const PartialAssignment& partial,
                                              const GammaBounds& g, std::size_t width);

// commitment feasibility: up/down logic with windows truncated at the horizon start
bool commitment_feasible(const Instance& inst, const std::vector<double>& x);
// fixed plus start-up costs of a commitment schedule
double master_objective(const Instance& inst, const std::vector<double>& x);

// second stage with ramps written in x only
lp::LinearProgram build_subproblem(const Instance& inst, const std::vector<double>& x, std::size_t scenario);
// second stage with start-up/shut-down indicators derived from x
lp::LinearProgram build_subproblem_classic(const Instance& inst, const std::vector<double>& x, std::size_t scenario);

// Dual of the x-only second stage. Variable layout:
// [psi_1..T, beta_1..T, then per (unit, period): phi, pi, gamma, delta, eta]
struct DualLayout {
  std::size_t T = 0;
  std::size_t n = 0;
  std::size_t psi(std::size_t j) const { return j - 1; }
  std::size_t beta(std::size_t j) const { return T + j - 1; }
  std::size_t block(std::size_t i, std::size_t j) const { return 2 * T + 5 * (i * T + j - 1); }
  std::size_t phi(std::size_t i, std::size_t j) const { return block(i, j); }
  std::size_t pi(std::size_t i, std::size_t j) const { return block(i, j) + 1; }
  std::size_t gamma(std::size_t i, std::size_t j) const { return block(i, j) + 2; }
  std::size_t delta(std::size_t i, std::size_t j) const { return block(i, j) + 3; }
  std::size_t eta(std::size_t i, std::size_t j) const { return block(i, j) + 4; }
  std::size_t size() const { return 2 * T + 5 * n * T; }
};
lp::LinearProgram build_dual(const Instance& inst, const std::vector<double>& x, std::size_t scenario);

// dual value as an affine function of x: constant + sum coeffs[k] x_k
struct AffineForm {
  double constant = 0.0;
  std::vector<double> coeffs;
};
AffineForm dual_affine(const Instance& inst, std::size_t scenario, const std::vector<double>& u);

struct SubproblemEvaluation {
  bool feasible = false;
  double value = 0.0;             // probability-weighted second-stage cost
  std::vector<dd::CutRow> cuts;   // one feasibility cut per infeasible scenario, or one optimality cut
  std::vector<std::size_t> infeasible_scenarios;
  std::size_t lp_calls = 0;
};
SubproblemEvaluation evaluate_subproblems(const Instance& inst, const std::vector<double>& x);

struct GeneratorParams {
  std::size_t n = 2;
  int T = 3;
  std::size_t scenarios = 2;
  std::uint64_t seed = 1;
  double demand_lo = 0.75;  // fractions of total capacity
  double demand_hi = 1.0;
  double c_g_lo = 10.0, c_g_hi = 40.0;
  int max_min_up = 3, max_min_down = 3;
  bool ramp_equal = true;  // RU = SU and RD = SD
};
Instance gen_random_instance(const GeneratorParams& p);

class UcpMaster : public benders::MasterOracle {
 public:
  explicit UcpMaster(Instance inst);
  Sense sense() const override { return Sense::Min; }
  std::size_t num_vars() const override { return inst_.num_vars(); }
  benders::BuiltDiagram build_exact(const PartialAssignment& partial) const override;
  benders::BuiltDiagram build_restricted(const PartialAssignment& partial, std::size_t width) const override;
  benders::BuiltDiagram build_relaxed(const PartialAssignment& partial, std::size_t width) const override;
  double master_cost(const std::vector<double>& x) const override { return master_objective(inst_, x); }
  const GammaBounds& gamma() const { return gamma_; }

 private:
  Instance inst_;
  GammaBounds gamma_;
};

class UcpSubproblem : public benders::SubproblemOracle {
 public:
  explicit UcpSubproblem(Instance inst) : inst_(std::move(inst)) {}
  benders::SubproblemResult evaluate(const std::vector<double>& x) const override;

 private:
  Instance inst_;
};

}  // namespace ddbd::ucp
