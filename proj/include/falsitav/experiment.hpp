#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falsitav/falsify.hpp"
#include "falsitav/scenario.hpp"

namespace falsitav {

struct ExperimentConfig {
  std::vector<std::string> strategies;  // "ur", "ca-ur", "ca-sa"
  std::string mode = "glancing";        // or "falsify"
  Budget budget{200, 50, 20};
  std::uint64_t base_seed = 0;
  int ca_strength = 2;
  std::vector<int> bins;  // per continuous parameter; default 4 each
  double dt = 0.05;
  double horizon = 30.0;
  PerceptionParams perception;
  std::string spec_text;  // empty -> built-in collision spec
  SaParams sa;
  int jobs = 1;

  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
};

struct TruncatedNormalFit {
  double mean = 0;
  double std = 0;
  bool degenerate = false;  // all samples equal
};

// MLE of a normal truncated to [0, inf), via nested 1-D golden-section
// search on the profile likelihood. Requires >= 2 samples.
TruncatedNormalFit fit_truncated_normal(const std::vector<double>& samples);

struct StrategySummary {
  std::string strategy;
  std::vector<double> trial_minima;      // best objective per trial
  std::vector<double> trial_robustness;  // robustness of the best evaluation
  std::vector<int> sims_used;
  TruncatedNormalFit fit;
  double mean_best = 0;
  double std_best = 0;
};

struct ExperimentReport {
  std::vector<StrategySummary> per_strategy;
  bool violation_found = false;  // robustness < 0 seen (falsify mode halt)
  std::string results_csv;       // full per-simulation log
  std::string summary_csv;
  std::string histogram_csv;
};

// Runs every (strategy x trial) cell against the scenario template. Cells
// are dispatched to an OpenMP worker pool of config.jobs threads; output
// ordering and content are identical to the serial run.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const ScenarioTemplate& tmpl);

// Single trial of one strategy; used by the falsify CLI and tests.
TrialResult run_strategy_trial(const std::string& strategy,
                               const ExperimentConfig& config,
                               const ScenarioTemplate& tmpl,
                               std::uint64_t trial_seed);

}  // namespace falsitav
