#include "falsitav/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "falsitav/util.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace falsitav {

std::string ExperimentConfig::to_json_string() const {
  nlohmann::json j;
  j["strategies"] = strategies;
  j["mode"] = mode;
  j["budget"] = {{"total_sims", budget.total_sims},
                 {"per_case_cap", budget.per_case_cap},
                 {"trials", budget.trials}};
  j["base_seed"] = base_seed;
  j["ca_strength"] = ca_strength;
  j["bins"] = bins;
  j["dt"] = dt;
  j["horizon"] = horizon;
  j["perception"] = nlohmann::json::parse(perception.to_json_string());
  j["spec"] = spec_text;
  j["sa"] = {{"t_initial", sa.t_initial},
             {"t_final", sa.t_final},
             {"step_fraction", sa.step_fraction}};
  j["jobs"] = jobs;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.strategies = j.value("strategies", std::vector<std::string>{"ur"});
  for (const auto& s : c.strategies)
    if (s != "ur" && s != "ca-ur" && s != "ca-sa")
      throw std::invalid_argument("config error at /strategies: unknown strategy '" + s + "'");
  c.mode = j.value("mode", std::string("glancing"));
  if (c.mode != "glancing" && c.mode != "falsify")
    throw std::invalid_argument("config error at /mode: must be glancing or falsify");
  if (j.contains("budget")) {
    const auto& b = j["budget"];
    c.budget.total_sims = b.value("total_sims", 200);
    c.budget.per_case_cap = b.value("per_case_cap", 50);
    c.budget.trials = b.value("trials", 20);
  }
  if (c.budget.per_case_cap > c.budget.total_sims)
    throw std::invalid_argument("config error at /budget: per_case_cap > total_sims");
  c.base_seed = j.value("base_seed", 0ull);
  c.ca_strength = j.value("ca_strength", 2);
  c.bins = j.value("bins", std::vector<int>{});
  c.dt = j.value("dt", 0.05);
  c.horizon = j.value("horizon", 30.0);
  if (j.contains("perception"))
    c.perception = PerceptionParams::from_json_string(j["perception"].dump());
  c.spec_text = j.value("spec", std::string());
  if (j.contains("sa")) {
    const auto& s = j["sa"];
    c.sa.t_initial = s.value("t_initial", 1.0);
    c.sa.t_final = s.value("t_final", 0.01);
    c.sa.step_fraction = s.value("step_fraction", 0.1);
  }
  c.jobs = j.value("jobs", 1);
  return c;
}

// ---------------------------------------------------------------------------
// Truncated-normal MLE
// ---------------------------------------------------------------------------

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 100) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2;
}

}  // namespace

TruncatedNormalFit fit_truncated_normal(const std::vector<double>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("fit needs at least 2 samples");
  double n = static_cast<double>(samples.size());
  double m0 = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var0 = 0;
  for (double x : samples) var0 += (x - m0) * (x - m0);
  var0 /= n;
  double s0 = std::sqrt(var0);
  if (s0 <= 1e-12 * std::max(1.0, std::abs(m0))) return {m0, 0, true};

  auto loglik = [&](double mu, double sigma) {
    double ll = -n * std::log(sigma) - n * std::log(norm_cdf(mu / sigma));
    for (double x : samples) {
      double z = (x - mu) / sigma;
      ll -= 0.5 * z * z;
    }
    return ll;
  };
  auto profile = [&](double mu) {
    double ls = golden_max(
        [&](double logsig) { return loglik(mu, std::exp(logsig)); },
        std::log(s0) - 6, std::log(s0) + 4);
    return loglik(mu, std::exp(ls));
  };
  double mu = golden_max(profile, m0 - 10 * s0, m0 + 10 * s0);
  double logsig = golden_max(
      [&](double ls) { return loglik(mu, std::exp(ls)); }, std::log(s0) - 6,
      std::log(s0) + 4);
  return {mu, std::exp(logsig), false};
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> scenario_signal_names(std::size_t agent_count) {
  std::vector<std::string> names = {"v_ego", "ego_x", "ego_y", "ego_heading"};
  for (std::size_t i = 1; i <= agent_count; ++i)
    names.push_back("dist_" + std::to_string(i));
  for (std::size_t i = 1; i <= agent_count; ++i)
    names.push_back("front_" + std::to_string(i));
  for (std::size_t i = 1; i <= agent_count; ++i) {
    names.push_back("obj" + std::to_string(i) + "_x");
    names.push_back("obj" + std::to_string(i) + "_y");
  }
  return names;
}

FormulaPtr parse_spec(const ExperimentConfig& config,
                      const ScenarioTemplate& tmpl) {
  std::string text = config.spec_text.empty()
                         ? collision_spec_text(
                               static_cast<int>(tmpl.base.agents.size()))
                         : config.spec_text;
  auto names = scenario_signal_names(tmpl.base.agents.size());
  return parse_formula(text,
                       std::set<std::string>(names.begin(), names.end()));
}

std::vector<int> effective_bins(const ExperimentConfig& config,
                                const ScenarioTemplate& tmpl) {
  if (!config.bins.empty()) return config.bins;
  return std::vector<int>(tmpl.space.continuous.size(), 4);
}

TrialResult run_one(const std::string& strategy,
                    const ExperimentConfig& config,
                    const ScenarioTemplate& tmpl, const FormulaPtr& spec,
                    std::uint64_t trial_seed, std::vector<double>* wall_ms) {
  Objective obj;
  obj.mode = config.mode == "falsify" ? Objective::Mode::Falsify
                                      : Objective::Mode::Glancing;
  EvalFn eval = [&](const ParamValuation& v, int sim_index) {
    ScenarioConfig cfg = tmpl.instantiate(v);
    auto t0 = std::chrono::steady_clock::now();
    SimOutcome outcome = simulate(cfg, config.perception, config.dt,
                                  config.horizon,
                                  derive_seed(trial_seed, sim_index));
    auto t1 = std::chrono::steady_clock::now();
    if (wall_ms)
      wall_ms->push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
    return robustness(spec, outcome.trace, 0);
  };

  if (strategy == "ur")
    return run_global_ur(tmpl.space, eval, obj, config.budget, trial_seed);
  auto bins = effective_bins(config, tmpl);
  if (strategy == "ca-ur")
    return run_ca_ur(tmpl.space, eval, obj, config.budget, config.ca_strength,
                     bins, trial_seed);
  if (strategy == "ca-sa")
    return run_ca_sa(tmpl.space, eval, obj, config.budget, config.ca_strength,
                     bins, config.sa, trial_seed);
  throw std::invalid_argument("unknown strategy: " + strategy);
}

}  // namespace

TrialResult run_strategy_trial(const std::string& strategy,
                               const ExperimentConfig& config,
                               const ScenarioTemplate& tmpl,
                               std::uint64_t trial_seed) {
  auto spec = parse_spec(config, tmpl);
  return run_one(strategy, config, tmpl, spec, trial_seed, nullptr);
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const ScenarioTemplate& tmpl) {
  auto spec = parse_spec(config, tmpl);
  int n_strategies = static_cast<int>(config.strategies.size());
  int n_trials = config.budget.trials;
  int n_cells = n_strategies * n_trials;

  struct Cell {
    TrialResult result;
    std::vector<double> wall_ms;
    std::exception_ptr error;
  };
  std::vector<Cell> cells(n_cells);

#ifdef _OPENMP
  int threads = std::max(1, config.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int cell = 0; cell < n_cells; ++cell) {
    int s = cell / n_trials;
    int trial = cell % n_trials;
    try {
      cells[cell].result =
          run_one(config.strategies[s], config, tmpl, spec,
                  config.base_seed + static_cast<std::uint64_t>(trial),
                  &cells[cell].wall_ms);
    } catch (...) {
      cells[cell].error = std::current_exception();
    }
  }
  for (auto& c : cells)
    if (c.error) std::rethrow_exception(c.error);

  ExperimentReport report;

  // results.csv: ordered by (strategy, trial, sim_index) regardless of
  // worker completion order
  std::ostringstream results;
  results << "trial,strategy,sim_index";
  for (const auto& d : tmpl.space.discrete) results << ',' << d.name;
  for (const auto& c : tmpl.space.continuous) results << ',' << c.name;
  results << ",robustness,objective,wall_ms\n";
  for (int s = 0; s < n_strategies; ++s) {
    for (int trial = 0; trial < n_trials; ++trial) {
      const Cell& cell = cells[s * n_trials + trial];
      const auto& evals = cell.result.all_evaluations;
      for (std::size_t i = 0; i < evals.size(); ++i) {
        const Evaluation& e = evals[i];
        results << trial << ',' << config.strategies[s] << ',' << i;
        for (const auto& d : tmpl.space.discrete)
          results << ','
                  << d.levels[e.valuation.discrete_choice.at(d.name)];
        for (const auto& c : tmpl.space.continuous)
          results << ','
                  << format_double(e.valuation.continuous_value.at(c.name));
        results << ',' << format_double(e.robustness) << ','
                << format_double(e.objective) << ','
                << format_double(i < cell.wall_ms.size() ? cell.wall_ms[i] : 0)
                << '\n';
        if (config.mode == "falsify" && e.robustness < 0)
          report.violation_found = true;
      }
    }
  }
  report.results_csv = results.str();

  for (int s = 0; s < n_strategies; ++s) {
    StrategySummary sum;
    sum.strategy = config.strategies[s];
    for (int trial = 0; trial < n_trials; ++trial) {
      const auto& r = cells[s * n_trials + trial].result;
      sum.trial_minima.push_back(r.best.objective);
      sum.trial_robustness.push_back(r.best.robustness);
      sum.sims_used.push_back(r.sims_used);
    }
    double n = static_cast<double>(sum.trial_minima.size());
    sum.mean_best =
        std::accumulate(sum.trial_minima.begin(), sum.trial_minima.end(), 0.0) /
        n;
    double var = 0;
    for (double v : sum.trial_minima)
      var += (v - sum.mean_best) * (v - sum.mean_best);
    sum.std_best = std::sqrt(var / n);
    if (sum.trial_minima.size() >= 2)
      sum.fit = fit_truncated_normal(sum.trial_minima);
    else
      sum.fit = {sum.mean_best, 0, true};
    report.per_strategy.push_back(std::move(sum));
  }

  std::ostringstream summary;
  summary << "strategy,trials,mean_best_objective,std_best_objective,"
             "fit_mean,fit_std,fit_degenerate,mean_sims_used\n";
  for (const auto& s : report.per_strategy) {
    double mean_sims =
        std::accumulate(s.sims_used.begin(), s.sims_used.end(), 0.0) /
        std::max<std::size_t>(1, s.sims_used.size());
    summary << s.strategy << ',' << s.trial_minima.size() << ','
            << format_double(s.mean_best) << ',' << format_double(s.std_best)
            << ',' << format_double(s.fit.mean) << ','
            << format_double(s.fit.std) << ',' << (s.fit.degenerate ? 1 : 0)
            << ',' << format_double(mean_sims) << '\n';
  }
  report.summary_csv = summary.str();

  // histogram of per-trial minima, 10 equal bins over the pooled range
  double hi = 0;
  for (const auto& s : report.per_strategy)
    for (double v : s.trial_minima) hi = std::max(hi, std::abs(v));
  if (hi == 0) hi = 1;
  constexpr int kBins = 10;
  std::ostringstream hist;
  hist << "strategy,bin_lo,bin_hi,count\n";
  for (const auto& s : report.per_strategy) {
    std::vector<int> counts(kBins, 0);
    for (double v : s.trial_minima) {
      int b = std::min(kBins - 1,
                       static_cast<int>(std::abs(v) / hi * kBins));
      ++counts[b];
    }
    for (int b = 0; b < kBins; ++b)
      hist << s.strategy << ',' << format_double(hi * b / kBins) << ','
           << format_double(hi * (b + 1) / kBins) << ',' << counts[b] << '\n';
  }
  report.histogram_csv = hist.str();

  return report;
}

}  // namespace falsitav
