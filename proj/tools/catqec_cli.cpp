// Batch front-end: scenario subcommands over a key=value config file, CSV and
// JSON outputs, optional truncation-convergence check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "catqec/cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<uint64_t> seed;
  std::optional<int> fock_dim;
  std::optional<std::string> gate_model;
  bool check_convergence = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "key=value config file");
  cmd->add_option("--out", args->out_dir, "output directory for CSV/JSON files");
  cmd->add_option("--seed", args->seed, "override the config seed");
  cmd->add_option("--fock-dim", args->fock_dim, "override the Fock truncation");
  cmd->add_option("--gate-model", args->gate_model,
                  "dispersive shift during selective pulses: suspended|active")
      ->check(CLI::IsMember({"suspended", "active"}));
  cmd->add_flag("--check-convergence", args->check_convergence,
                "re-run at fock_dim + 10 and require metric agreement at 1e-6");
}

catqec::ExperimentConfig resolve_config(const CommonArgs& args) {
  catqec::ExperimentConfig config;
  if (!args.config_path.empty())
    config = catqec::ExperimentConfig::from_file(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.fock_dim) config.fock_dim = *args.fock_dim;
  if (args.gate_model)
    config.gate_model = (*args.gate_model == "active")
                            ? catqec::GateModel::SelectivePhase::active
                            : catqec::GateModel::SelectivePhase::suspended;
  config.validate();
  return config;
}

int finish(const catqec::cli::RunSummary& summary, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / (summary.scenario + "_summary.json");
  std::ofstream f(path, std::ios::binary);
  f << summary.to_json() << "\n";
  std::cout << summary.to_json() << "\n";
  if (summary.convergence_checked && !summary.convergence_passed) {
    std::cerr << "convergence check FAILED: " << summary.convergence_detail
              << " (summary is non-publishable)\n";
    return kExitConvergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cat-code quantum memory simulator"};
  app.require_subcommand(1);

  CommonArgs common;
  catqec::cli::CommandOptions opt;
  int n_traj = 2000;
  std::vector<double> tw_list;
  std::vector<std::string> checkpoints;
  bool no_corrections = false;

  CLI::App* c_encode = app.add_subcommand("encode", "encode/decode fidelity");
  CLI::App* c_correct = app.add_subcommand("correct", "correction fidelity");
  CLI::App* c_aqec = app.add_subcommand("aqec", "autonomous correction loop");
  CLI::App* c_mbqec = app.add_subcommand("mbqec", "measurement-based trajectories");
  CLI::App* c_sweep = app.add_subcommand("sweep-tw", "waiting-time sweep");
  CLI::App* c_portrait = app.add_subcommand("phase-portrait", "Husimi-Q grids");
  for (CLI::App* c : {c_encode, c_correct, c_aqec, c_mbqec, c_sweep, c_portrait})
    add_common(c, &common);

  c_aqec->add_flag("--no-corrections", no_corrections,
                   "free decay without correction sequences");
  c_mbqec->add_option("--trajectories", n_traj, "trajectory count")->check(CLI::PositiveNumber);
  c_sweep->add_option("--tw-list", tw_list, "waiting times in us")->delimiter(',');
  c_portrait->add_option("--checkpoints", checkpoints,
                         "vacuum | encode:<k|end> | correct:<k|end>")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const catqec::ExperimentConfig config = resolve_config(common);
    opt.out_dir = common.out_dir;
    opt.check_convergence = common.check_convergence;
    opt.corrections_enabled = !no_corrections;
    opt.n_trajectories = n_traj;
    opt.tw_list_us = tw_list;
    opt.checkpoints = checkpoints;

    catqec::cli::RunSummary summary;
    if (app.got_subcommand(c_encode)) summary = catqec::cli::cmd_encode_fidelity(config, opt);
    else if (app.got_subcommand(c_correct)) summary = catqec::cli::cmd_correct_fidelity(config, opt);
    else if (app.got_subcommand(c_aqec)) summary = catqec::cli::cmd_aqec(config, opt);
    else if (app.got_subcommand(c_mbqec)) summary = catqec::cli::cmd_mbqec(config, opt);
    else if (app.got_subcommand(c_sweep)) summary = catqec::cli::cmd_sweep_tw(config, opt);
    else summary = catqec::cli::cmd_phase_portrait(config, opt);
    return finish(summary, common.out_dir);
  } catch (const catqec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
