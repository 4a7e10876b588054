#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddbd/benders.hpp"
#include "ddbd/ucp.hpp"
#include "json.hpp"

namespace ddbd::cli {

enum ExitCode : int {
  kExitOptimal = 0,
  kExitError = 1,
  kExitTimeLimit = 2,
  kExitInfeasible = 3,
  kExitCheckFailed = 4,  // verify found a broken condition, or compare saw disagreeing optima
};

struct GenSpec {
  std::size_t n = 2;
  int T = 3;
  std::size_t scenarios = 2;
  std::uint64_t seed = 1;
};
// "n,T,S,seed"; the seed may be omitted when allow_no_seed is set
GenSpec parse_gen(const std::string& text, bool allow_no_seed = false);
// "1,2,7" or "1-5" or a mix
std::vector<std::uint64_t> parse_seeds(const std::string& text);

struct RunConfig {
  std::string command;
  std::vector<std::string> instances;
  std::optional<std::string> gen;
  std::optional<std::string> seeds;  // compare only, paired with a gen spec without seed
  std::size_t width = 2;
  std::optional<dd::Sense> sense;
  double time_limit = 3600.0;
  bool no_relaxed_cuts = false;
  std::string emit_dot;  // directory
  std::string out;       // file, stdout when empty
  std::string csv;       // solve: extra CSV file
  double demand_lo = 0.75, demand_hi = 1.0;
};

// Example-sized two-stage problem over an explicit point set
struct TwoStageFile {
  dd::Sense sense = dd::Sense::Max;
  std::vector<double> objective;
  std::vector<std::vector<double>> points;
  double z_lo = -1e6, z_hi = 1e6;
  benders::TwoStageLinear second_stage;
};
TwoStageFile two_stage_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TwoStageFile& f);

struct Problem {
  std::string id;
  dd::Sense sense = dd::Sense::Min;
  std::optional<ucp::Instance> ucp;
  std::optional<TwoStageFile> two_stage;
  std::unique_ptr<benders::MasterOracle> master;
  std::unique_ptr<benders::SubproblemOracle> sub;
};
Problem make_problem(ucp::Instance inst, std::string id);
Problem make_problem(TwoStageFile f, std::string id);
// dispatches on the "format" field
Problem load_problem(const std::string& path);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_dot(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// DDBD_LOG=trace|debug|info|warn|error|off, default warn
void configure_logging();

}  // namespace ddbd::cli
