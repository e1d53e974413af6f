#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "colosim_cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = colosim::cli;

  CLI::App app{"colosim: container co-location attack simulator"};
  app.require_subcommand(1);

  cli::RunOptions run;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a single experiment");
  run_cmd->add_option("--config", run.config, "Experiment config (JSON)")->required();
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "Seed; falls back to COLOSIM_SEED");
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  cli::SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
  sweep_cmd->add_option("--config", sweep.config, "Base experiment config (JSON)")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "Grid, e.g. \"attack.k=1..10;attack.spreading=true,false\"");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();

  cli::AttackGenOptions gen;
  std::uint64_t gen_seed = 0;
  std::string spread = "true";
  auto* gen_cmd = app.add_subcommand("attack-gen", "Generate attack manifests for a victim manifest");
  gen_cmd->add_option("--victim", gen.victim, "Victim pod manifest (YAML)")->required();
  gen_cmd->add_option("--k", gen.k, "Number of attack instances")->required();
  gen_cmd->add_option("--spread", spread, "Use the spreading label (true/false)")
      ->check(CLI::IsMember({"true", "false"}));
  gen_cmd->add_option("--noise", gen.noise, "Per-rule replication drop probability");
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Seed; falls back to COLOSIM_SEED");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  if (run_cmd->parsed()) {
    if (seed_opt->count() > 0) run.seed = run_seed;
    return cli::cmd_run(run, std::cerr);
  }
  if (sweep_cmd->parsed()) return cli::cmd_sweep(sweep, std::cerr);
  if (gen_seed_opt->count() > 0) gen.seed = gen_seed;
  gen.spread = spread == "true";
  return cli::cmd_attack_gen(gen, std::cerr);
}
