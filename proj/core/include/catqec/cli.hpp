#pragma once

#include <map>
#include <string>
#include <vector>

#include "catqec/analysis.hpp"
#include "catqec/circuits.hpp"
#include "catqec/config.hpp"

namespace catqec::cli {

struct RunSummary {
  std::string scenario;
  std::map<std::string, std::string> config_echo;
  std::map<std::string, double> metrics;
  bool convergence_checked = false;
  bool convergence_passed = true;
  std::string convergence_detail;
  double wall_clock_s = 0.0;

  std::string to_json() const;
};

struct CommandOptions {
  std::string out_dir = ".";
  bool check_convergence = false;
  bool corrections_enabled = true;         // aqec
  int n_trajectories = 2000;               // mbqec
  std::vector<double> tw_list_us;          // sweep-tw
  std::vector<std::string> checkpoints;    // phase-portrait
};

RunSummary cmd_encode_fidelity(const ExperimentConfig& config, const CommandOptions& opt);
RunSummary cmd_correct_fidelity(const ExperimentConfig& config, const CommandOptions& opt);
RunSummary cmd_aqec(const ExperimentConfig& config, const CommandOptions& opt);
RunSummary cmd_sweep_tw(const ExperimentConfig& config, const CommandOptions& opt);
RunSummary cmd_mbqec(const ExperimentConfig& config, const CommandOptions& opt);
RunSummary cmd_phase_portrait(const ExperimentConfig& config, const CommandOptions& opt);

// measurement helpers shared with the test suites ---------------------------

struct GateFidelityReport {
  double mean_infidelity = 0.0;
  double worst_infidelity = 0.0;
  double duration_us = 0.0;
};

/// Noisy encode applied to the six Bloch-sphere logical inputs.
GateFidelityReport measure_epsilon_encode(const ExperimentConfig& config);
/// Noisy decode of ideally prepared code states.
GateFidelityReport measure_epsilon_decode(const ExperimentConfig& config);
/// Noisy correction applied to psi^(n) at the damped amplitude; index 0 or 1.
GateFidelityReport measure_epsilon_correct_branch(const ExperimentConfig& config, int n);
/// Worst of the two branches.
GateFidelityReport measure_epsilon_correct(const ExperimentConfig& config);

std::string cycle_reports_csv(const std::vector<CycleReport>& reports);
std::string husimi_csv(const Eigen::MatrixXd& grid, const GridSpec& spec);

/// Exponential lifetime from cycle reports: drops the first cycle, and for
/// free-decay series restricts the fit to fidelities above a floor of 0.2.
LifetimeFit fit_cycle_lifetime(const std::vector<CycleReport>& reports,
                               bool corrected_decay);

/// Initial decay rate (1/us) over cycles 2..12, the regime where the
/// per-cycle loss equals eps_correct + eps_wait and the product channel
/// model applies. Long windows mix in the saturation of the uncorrectable
/// double-jump channel and coherent gate-floor buildup.
double initial_decay_rate(const std::vector<CycleReport>& reports);

}  // namespace catqec::cli
