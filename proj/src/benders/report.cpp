#include <cstdio>

#include "ddbd/benders.hpp"
#include "ddbd/dd_json.hpp"

namespace ddbd::benders {

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace

nlohmann::json report_to_json(const SolveReport& r, const std::string& instance_id) {
  nlohmann::json j;
  j["format"] = "ddbd-solve-report";
  j["version"] = kReportVersion;
  j["instance"] = instance_id;
  j["status"] = status_name(r.status);
  if (r.x.empty() && r.status != SolveStatus::Optimal) {
    j["value"] = nullptr;
  } else {
    j["value"] = r.value;
    j["x"] = r.x;
    j["z"] = r.z;
  }
  j["counts"] = {{"feasibility_cuts", r.feasibility_cuts},
                 {"optimality_cuts", r.optimality_cuts},
                 {"branches", r.branches},
                 {"lp_calls", r.lp_calls},
                 {"nodes", r.nodes_explored}};
  j["seconds"] = r.seconds;
  j["width_cap"] = r.width_cap;
  j["cuts"] = nlohmann::json::array();
  for (const auto& c : r.cuts) j["cuts"].push_back(dd::cut_to_json(c));
  return j;
}

std::string csv_header() { return "schema,instance,method,status,value,time_s,f_cuts,o_cuts,branches,lp_calls"; }

std::string csv_row(const SolveReport& r, const std::string& instance_id, const std::string& method) {
  const bool has_value = !r.x.empty() || r.status == SolveStatus::Optimal;
  return "ddbd-csv-1," + instance_id + "," + method + "," + status_name(r.status) + "," +
         (has_value ? num(r.value) : std::string()) + "," + num(r.seconds) + "," +
         std::to_string(r.feasibility_cuts) + "," + std::to_string(r.optimality_cuts) + "," +
         std::to_string(r.branches) + "," + std::to_string(r.lp_calls);
}

}  // namespace ddbd::benders
