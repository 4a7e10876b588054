#include <iostream>

#include "CLI11.hpp"
#include "ddbd/cli.hpp"

int main(int argc, char** argv) {
  using namespace ddbd;
  cli::configure_logging();
  CLI::App app{"decision-diagram Benders decomposition"};
  app.require_subcommand(1);
  cli::RunConfig cfg;
  std::string sense;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--instance", cfg.instances, "instance file (UCP or two-stage JSON)");
    sub->add_option("--gen", cfg.gen, "generate a UCP instance: n,T,S,seed");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--demand", [&](const CLI::results_t& r) {
         cfg.demand_lo = std::stod(r.at(0));
         cfg.demand_hi = std::stod(r.at(1));
         return true;
       }, "demand range as fractions of total capacity")
        ->expected(2);
  };
  auto engine = [&](CLI::App* sub) {
    sub->add_option("--width", cfg.width, "width of restricted and relaxed diagrams")->check(CLI::PositiveNumber);
    sub->add_option("--sense", sense, "min or max; must match the instance")->check(CLI::IsMember({"min", "max"}));
    sub->add_option("--time-limit", cfg.time_limit, "seconds")->check(CLI::PositiveNumber);
    sub->add_flag("--no-relaxed-cuts", cfg.no_relaxed_cuts, "skip subproblem calls in the relaxed phase");
  };

  auto* solve = app.add_subcommand("solve", "solve one instance");
  common(solve);
  engine(solve);
  solve->add_option("--emit-dot", cfg.emit_dot, "write a DOT file per refinement iteration into DIR");
  solve->add_option("--csv", cfg.csv, "also write the CSV row to this file");

  auto* compare = app.add_subcommand("compare", "dd-bd, naive Benders and enumeration side by side");
  common(compare);
  engine(compare);
  compare->add_option("--seeds", cfg.seeds, "seed list for --gen n,T,S, e.g. 1-5 or 1,4,9");

  auto* verify = app.add_subcommand("verify", "check a rectangular decomposition fixture");
  verify->add_option("--instance,--fixture", cfg.instances, "fixture file")->required();
  verify->alias("verify-decomposition");

  auto* gen = app.add_subcommand("gen", "write a random UCP instance");
  common(gen);

  auto* dot = app.add_subcommand("dot", "export the exact master diagram as DOT");
  common(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kExitError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (!sense.empty()) cfg.sense = sense == "min" ? dd::Sense::Min : dd::Sense::Max;
  return cli::run(cfg, std::cout, std::cerr);
}
