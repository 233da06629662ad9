#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "falsitav/covering.hpp"
#include "falsitav/stl.hpp"
#include "falsitav/trace.hpp"

namespace falsitav {

// Scalar objective on a trace's robustness value. Glancing mode minimizes
// |R| with boolean-atom saturation capped first; falsify mode minimizes R.
struct Objective {
  enum class Mode { Falsify, Glancing };
  Mode mode = Mode::Glancing;
  double saturation_cap = kBoolSaturation;

  double operator()(double rob) const;
};

struct Budget {
  int total_sims = 200;
  int per_case_cap = 50;
  int trials = 1;
};

struct Evaluation {
  ParamValuation valuation;
  double robustness = 0;
  double objective = 0;
};

struct TrialResult {
  Evaluation best;
  std::vector<Evaluation> all_evaluations;
  int sims_used = 0;
};

// Runs one simulation for a valuation; sim_index is the position within the
// trial's budget (used to derive per-simulation seeds). Returns robustness.
using EvalFn = std::function<double(const ParamValuation&, int sim_index)>;

TrialResult run_global_ur(const ParameterSpace& space, const EvalFn& eval,
                          const Objective& obj, const Budget& budget,
                          std::uint64_t seed);

// Phase 1: covering array over the discrete parameters plus binned
// continuous parameters (bin centers); phase 2: per best discrete case,
// uniform sampling of the continuous parameters, restarting at the next
// best case every per_case_cap simulations until the budget is spent.
TrialResult run_ca_ur(const ParameterSpace& space, const EvalFn& eval,
                      const Objective& obj, const Budget& budget,
                      int ca_strength, const std::vector<int>& bins,
                      std::uint64_t seed);

struct SaParams {
  double t_initial = 1.0;
  double t_final = 0.01;
  double step_fraction = 0.1;  // proposal std as a fraction of interval width
};

// As run_ca_ur, with phase 2 replaced by simulated annealing over the
// continuous parameters, initialized at the case's bin centers.
TrialResult run_ca_sa(const ParameterSpace& space, const EvalFn& eval,
                      const Objective& obj, const Budget& budget,
                      int ca_strength, const std::vector<int>& bins,
                      const SaParams& sa, std::uint64_t seed);

struct SaHistory {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

struct SaResult {
  std::vector<double> best_point;
  double best_value = 0;
  SaHistory history;
};

// Metropolis accept/reject with geometric cooling; per-coordinate Gaussian
// proposals reflected at the bounds. Returns the best-ever point.
SaResult simulated_annealing(const std::vector<double>& init,
                             const std::function<double(const std::vector<double>&)>& obj,
                             int evals,
                             const std::vector<std::pair<double, double>>& bounds,
                             const SaParams& sa, std::uint64_t seed);

// Bin centers of `bins` equal-width bins over [lower, upper].
std::vector<double> bin_centers(double lower, double upper, int bins);

// |robustness at index 0|, saturation-capped (Objective glancing mode).
double glancing_objective(const Trace& trace, const FormulaPtr& spec);

}  // namespace falsitav
