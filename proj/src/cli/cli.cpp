#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ddbd/cli.hpp"
#include "ddbd/oracle.hpp"
#include "ddbd/rect_decomp.hpp"

namespace ddbd::cli {

namespace {

using benders::SolveReport;
using benders::SolveStatus;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

lp::RowSense row_sense(const std::string& s) {
  if (s == "<=") return lp::RowSense::Le;
  if (s == ">=") return lp::RowSense::Ge;
  if (s == "=") return lp::RowSense::Eq;
  throw std::invalid_argument("row sense must be <=, >= or =");
}

const char* row_sense_text(lp::RowSense s) {
  return s == lp::RowSense::Le ? "<=" : s == lp::RowSense::Ge ? ">=" : "=";
}

dd::Sense sense_from(const std::string& s) {
  if (s == "min") return dd::Sense::Min;
  if (s == "max") return dd::Sense::Max;
  throw std::invalid_argument("sense must be min or max");
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return kExitOptimal;
    case SolveStatus::TimeLimit: return kExitTimeLimit;
    case SolveStatus::Infeasible: return kExitInfeasible;
  }
  return kExitError;
}

// Output target: file when a path is given, the passed stream otherwise
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw std::runtime_error("cannot write " + path);
    os_ = &file_;
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

ucp::Instance generated(const GenSpec& g, const RunConfig& cfg) {
  ucp::GeneratorParams p;
  p.n = g.n;
  p.T = g.T;
  p.scenarios = g.scenarios;
  p.seed = g.seed;
  p.demand_lo = cfg.demand_lo;
  p.demand_hi = cfg.demand_hi;
  return ucp::gen_random_instance(p);
}

std::string gen_id(const GenSpec& g) {
  return "gen-" + std::to_string(g.n) + "-" + std::to_string(g.T) + "-" + std::to_string(g.scenarios) + "-" +
         std::to_string(g.seed);
}

Problem problem_from(const RunConfig& cfg) {
  if (cfg.gen && !cfg.instances.empty()) throw std::invalid_argument("give either --instance or --gen, not both");
  if (cfg.gen) {
    const auto g = parse_gen(*cfg.gen);
    return make_problem(generated(g, cfg), gen_id(g));
  }
  if (cfg.instances.size() != 1) throw std::invalid_argument("need exactly one --instance or a --gen spec");
  return load_problem(cfg.instances.front());
}

void check_sense(const RunConfig& cfg, const Problem& p) {
  if (cfg.sense && *cfg.sense != p.sense)
    throw std::invalid_argument(std::string("instance is a ") + (p.sense == dd::Sense::Min ? "min" : "max") +
                                " problem but --sense asks otherwise");
}

benders::EngineConfig engine_config(const RunConfig& cfg) {
  if (cfg.width < 1) throw std::invalid_argument("--width must be at least 1");
  if (!(cfg.time_limit > 0)) throw std::invalid_argument("--time-limit must be positive");
  benders::EngineConfig e;
  e.width = cfg.width;
  e.time_limit_seconds = cfg.time_limit;
  e.relaxed_cuts = !cfg.no_relaxed_cuts;
  if (!cfg.emit_dot.empty()) {
    std::filesystem::create_directories(cfg.emit_dot);
    const std::string dir = cfg.emit_dot;
    e.diagram_hook = [dir](const std::string& tag, const dd::DecisionDiagram& d) {
      std::ofstream f(std::filesystem::path(dir) / (tag + ".dot"));
      f << dd::to_dot(d);
    };
  }
  return e;
}

// enumeration reference, shaped like a solver report
SolveReport brute_force_report(const Problem& p) {
  const auto start = std::chrono::steady_clock::now();
  oracle::OracleResult r;
  std::size_t lp_calls = 0;
  if (p.ucp) {
    r = oracle::brute_force_solve(*p.ucp);
    lp_calls = r.table.size() * p.ucp->scenarios.size();
  } else {
    const auto& f = *p.two_stage;
    r = oracle::brute_force_two_stage(benders::PointSetMaster(f.sense, f.objective, f.points, f.z_lo, f.z_hi),
                                      benders::LinearSubproblem(f.second_stage));
    lp_calls = r.table.size();
  }
  SolveReport rep;
  rep.status = r.feasible ? SolveStatus::Optimal : SolveStatus::Infeasible;
  rep.value = r.best_cost;
  rep.x = r.best_x;
  rep.z = r.best_cost - (r.feasible ? p.master->master_cost(r.best_x) : 0.0);
  rep.lp_calls = lp_calls;
  rep.width_cap = 0;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-6 * (1.0 + std::abs(b)); }

}  // namespace

GenSpec parse_gen(const std::string& text, bool allow_no_seed) {
  const auto parts = split(text, ',');
  if (parts.size() != 4 && !(allow_no_seed && parts.size() == 3))
    throw std::invalid_argument("generator spec must be n,T,S" + std::string(allow_no_seed ? "[,seed]" : ",seed"));
  GenSpec g;
  g.n = to_u64(parts[0]);
  g.T = static_cast<int>(to_u64(parts[1]));
  g.scenarios = to_u64(parts[2]);
  if (parts.size() == 4) g.seed = to_u64(parts[3]);
  if (g.n == 0 || g.T == 0 || g.scenarios == 0) throw std::invalid_argument("generator sizes must be positive");
  return g;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(to_u64(part));
      continue;
    }
    const auto a = to_u64(part.substr(0, dash)), b = to_u64(part.substr(dash + 1));
    if (b < a) throw std::invalid_argument("empty seed range " + part);
    for (auto s = a; s <= b; ++s) seeds.push_back(s);
  }
  return seeds;
}

TwoStageFile two_stage_from_json(const nlohmann::json& j) {
  if (j.at("format") != "ddbd-two-stage") throw std::invalid_argument("not a two-stage file");
  if (j.at("version") != 1) throw std::invalid_argument("unsupported two-stage version");
  TwoStageFile f;
  f.sense = sense_from(j.at("sense").get<std::string>());
  const auto& m = j.at("master");
  f.objective = m.at("objective").get<std::vector<double>>();
  f.points = m.at("points").get<std::vector<std::vector<double>>>();
  const auto zb = m.at("z_bounds").get<std::vector<double>>();
  if (zb.size() != 2 || zb[0] > zb[1]) throw std::invalid_argument("z_bounds must be [lo, hi]");
  f.z_lo = zb[0];
  f.z_hi = zb[1];
  const auto& s = j.at("second_stage");
  f.second_stage.sense = f.sense;
  f.second_stage.q = s.at("q").get<std::vector<double>>();
  for (const auto& r : s.at("rows")) {
    benders::TwoStageRow row;
    row.w = r.at("w").get<std::vector<double>>();
    row.t = r.at("t").get<std::vector<double>>();
    row.sense = row_sense(r.at("sense").get<std::string>());
    row.h = r.at("h").get<double>();
    if (row.w.size() != f.second_stage.q.size() || row.t.size() != f.objective.size())
      throw std::invalid_argument("second-stage row has the wrong length");
    f.second_stage.rows.push_back(std::move(row));
  }
  for (const auto& p : f.points)
    if (p.size() != f.objective.size()) throw std::invalid_argument("master point has the wrong length");
  return f;
}

nlohmann::json to_json(const TwoStageFile& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : f.second_stage.rows)
    rows.push_back({{"w", r.w}, {"t", r.t}, {"sense", row_sense_text(r.sense)}, {"h", r.h}});
  return {{"format", "ddbd-two-stage"},
          {"version", 1},
          {"sense", f.sense == dd::Sense::Min ? "min" : "max"},
          {"master", {{"objective", f.objective}, {"points", f.points}, {"z_bounds", {f.z_lo, f.z_hi}}}},
          {"second_stage", {{"q", f.second_stage.q}, {"rows", rows}}}};
}

Problem make_problem(ucp::Instance inst, std::string id) {
  Problem p;
  p.id = std::move(id);
  p.sense = dd::Sense::Min;
  p.master = std::make_unique<ucp::UcpMaster>(inst);
  p.sub = std::make_unique<ucp::UcpSubproblem>(inst);
  p.ucp = std::move(inst);
  return p;
}

Problem make_problem(TwoStageFile f, std::string id) {
  Problem p;
  p.id = std::move(id);
  p.sense = f.sense;
  p.master = std::make_unique<benders::PointSetMaster>(f.sense, f.objective, f.points, f.z_lo, f.z_hi);
  p.sub = std::make_unique<benders::LinearSubproblem>(f.second_stage);
  p.two_stage = std::move(f);
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": malformed JSON: " + e.what());
  }
  const std::string id = std::filesystem::path(path).stem().string();
  const auto fmt = j.value("format", std::string());
  try {
    if (fmt == "ddbd-ucp-instance") return make_problem(ucp::instance_from_json(j), id);
    if (fmt == "ddbd-two-stage") return make_problem(two_stage_from_json(j), id);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  throw std::invalid_argument(path + ": unknown format '" + fmt + "'");
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto p = problem_from(cfg);
  check_sense(cfg, p);
  const auto rep = benders::dd_bd_solve(*p.master, *p.sub, engine_config(cfg));
  {
    Sink json(cfg.out, out);
    json.get() << benders::report_to_json(rep, p.id).dump(2) << '\n';
  }
  const std::string row = benders::csv_row(rep, p.id, "dd-bd");
  if (!cfg.csv.empty()) {
    Sink csv(cfg.csv, out);
    csv.get() << benders::csv_header() << '\n' << row << '\n';
  } else if (!cfg.out.empty()) {
    out << benders::csv_header() << '\n' << row << '\n';
  }
  if (rep.status != SolveStatus::Optimal) err << "status: " << benders::status_name(rep.status) << '\n';
  return exit_for(rep.status);
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids;
  std::vector<std::function<Problem()>> makers;
  for (const auto& path : cfg.instances) makers.push_back([path] { return load_problem(path); });
  if (cfg.gen) {
    const auto g = parse_gen(*cfg.gen, true);
    std::vector<std::uint64_t> seeds;
    if (cfg.seeds) seeds = parse_seeds(*cfg.seeds);
    else if (split(*cfg.gen, ',').size() == 4) seeds = {g.seed};
    for (auto s : seeds) {
      GenSpec gs = g;
      gs.seed = s;
      makers.push_back([gs, &cfg] { return make_problem(generated(gs, cfg), gen_id(gs)); });
    }
  }
  const auto ecfg = engine_config(cfg);
  Sink sink(cfg.out, out);
  auto& os = sink.get();
  os << benders::csv_header() << ",agree\n";
  bool disagreement = false;
  for (const auto& make : makers) {
    Problem p;
    try {
      p = make();
    } catch (const std::exception& e) {
      err << "skipping instance: " << e.what() << '\n';
      continue;
    }
    struct Row {
      std::string method;
      std::optional<SolveReport> rep;
      std::string error;
    };
    std::vector<Row> rows;
    auto attempt = [&](const std::string& method, auto&& fn) {
      Row r{method, std::nullopt, {}};
      try {
        r.rep = fn();
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      rows.push_back(std::move(r));
    };
    attempt("dd-bd", [&] { return benders::dd_bd_solve(*p.master, *p.sub, ecfg); });
    attempt("naive-bd", [&] { return oracle::naive_benders(*p.master, *p.sub, cfg.time_limit); });
    attempt("brute-force", [&] { return brute_force_report(p); });
    // completed rows must agree on status and value
    const SolveReport* ref = nullptr;
    bool agree = true;
    for (const auto& r : rows) {
      if (!r.rep || r.rep->status == SolveStatus::TimeLimit) continue;
      if (!ref) {
        ref = &*r.rep;
        continue;
      }
      if (r.rep->status != ref->status) agree = false;
      else if (ref->status == SolveStatus::Optimal && !same_value(r.rep->value, ref->value)) agree = false;
    }
    disagreement = disagreement || !agree;
    for (const auto& r : rows) {
      if (r.rep) {
        os << benders::csv_row(*r.rep, p.id, r.method) << ',' << (agree ? "=" : "!=") << '\n';
      } else {
        os << "ddbd-csv-1," << p.id << ',' << r.method << ",error,,,,,,," << (agree ? "=" : "!=") << '\n';
        err << p.id << ' ' << r.method << ": " << r.error << '\n';
      }
    }
  }
  if (disagreement) {
    err << "optimal values disagree\n";
    return kExitCheckFailed;
  }
  return kExitOptimal;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.instances.size() != 1) throw std::invalid_argument("verify needs one --instance fixture");
  rect::Fixture fx;
  try {
    std::ifstream in(cfg.instances.front());
    if (!in) throw std::runtime_error("cannot open " + cfg.instances.front());
    fx = rect::load_fixture(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    err << "malformed fixture: " << e.what() << '\n';
    return kExitError;
  }
  const auto rep = rect::verify_decomposition(fx.set, fx.index_set, fx.pieces);
  auto line = [&](const std::string& name, bool ok) { out << name << ": " << (ok ? "pass" : "FAIL") << '\n'; };
  line("cond_i", rep.cond_i);
  line("cond_ii", rep.cond_ii);
  line("cond_iii_sampled", rep.cond_iii_sampled);
  for (const auto& n : rep.notes) out << "  note: " << n << '\n';
  bool ok = rep.all();
  if (!fx.objectives.empty()) {
    const auto maxima = rect::objective_maxima(fx.set, fx.pieces, fx.objectives);
    for (std::size_t k = 0; k < maxima.size(); ++k) {
      const auto& m = maxima[k];
      const std::string name = k < fx.objective_names.size() ? fx.objective_names[k] : "f" + std::to_string(k);
      out << "equivalence " << name << ": " << (m.agree() ? "pass" : "FAIL") << " (samples " << m.over_samples
          << ", extreme points " << m.over_extreme_points << ", box vertices " << m.over_box_vertices << ")\n";
      ok = ok && m.agree();
    }
  }
  out << (ok ? "all checks pass" : "some checks failed") << '\n';
  return ok ? kExitOptimal : kExitCheckFailed;
}

int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.gen) throw std::invalid_argument("gen needs --gen n,T,S,seed");
  const auto inst = generated(parse_gen(*cfg.gen), cfg);
  Sink sink(cfg.out, out);
  sink.get() << ucp::to_json(inst).dump(2) << '\n';
  return kExitOptimal;
}

int cmd_dot(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto p = problem_from(cfg);
  const auto built = p.master->build_exact({});
  Sink sink(cfg.out, out);
  sink.get() << dd::to_dot(built.dd);
  return kExitOptimal;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "solve") return cmd_solve(cfg, out, err);
    if (cfg.command == "compare") return cmd_compare(cfg, out, err);
    if (cfg.command == "verify") return cmd_verify(cfg, out, err);
    if (cfg.command == "gen") return cmd_gen(cfg, out, err);
    if (cfg.command == "dot") return cmd_dot(cfg, out, err);
    err << "unknown command " << cfg.command << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("DDBD_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace ddbd::cli
