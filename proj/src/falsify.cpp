#include "falsitav/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "falsitav/util.hpp"

namespace falsitav {

double Objective::operator()(double rob) const {
  double capped = std::clamp(rob, -saturation_cap, saturation_cap);
  return mode == Mode::Glancing ? std::abs(capped) : capped;
}

double glancing_objective(const Trace& trace, const FormulaPtr& spec) {
  Objective obj{Objective::Mode::Glancing};
  return obj(robustness(spec, trace, 0));
}

std::vector<double> bin_centers(double lower, double upper, int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  std::vector<double> c(bins);
  double w = (upper - lower) / bins;
  for (int b = 0; b < bins; ++b) c[b] = lower + (b + 0.5) * w;
  return c;
}

namespace {

ParamValuation sample_uniform(const ParameterSpace& space,
                              std::mt19937_64& rng) {
  ParamValuation v;
  for (const auto& d : space.discrete)
    v.discrete_choice[d.name] = std::uniform_int_distribution<std::size_t>(
        0, d.levels.size() - 1)(rng);
  for (const auto& c : space.continuous)
    v.continuous_value[c.name] =
        std::uniform_real_distribution<double>(c.lower, c.upper)(rng);
  return v;
}

struct Recorder {
  const EvalFn& eval;
  const Objective& obj;
  TrialResult result;
  int total_sims;

  Recorder(const EvalFn& e, const Objective& o, int total)
      : eval(e), obj(o), total_sims(total) {}

  bool exhausted() const { return result.sims_used >= total_sims; }

  double run(const ParamValuation& v) {
    if (exhausted()) throw std::logic_error("budget overrun");
    double rob = eval(v, result.sims_used);
    Evaluation e{v, rob, obj(rob)};
    result.all_evaluations.push_back(e);
    ++result.sims_used;
    return e.objective;
  }

  TrialResult finish() {
    auto it = std::min_element(
        result.all_evaluations.begin(), result.all_evaluations.end(),
        [](const Evaluation& a, const Evaluation& b) {
          return a.objective < b.objective;
        });
    if (it != result.all_evaluations.end()) result.best = *it;
    return std::move(result);
  }
};

double reflect_into(double y, double lo, double hi) {
  double period = 2 * (hi - lo);
  double z = std::fmod(y - lo, period);
  if (z < 0) z += period;
  return lo + (z <= hi - lo ? z : period - z);
}

}  // namespace

TrialResult run_global_ur(const ParameterSpace& space, const EvalFn& eval,
                          const Objective& obj, const Budget& budget,
                          std::uint64_t seed) {
  if (budget.total_sims < 1)
    throw std::invalid_argument("budget must allow at least one simulation");
  std::mt19937_64 rng(derive_seed(seed, 0x67550b));
  Recorder rec(eval, obj, budget.total_sims);
  while (!rec.exhausted()) rec.run(sample_uniform(space, rng));
  return rec.finish();
}

namespace {

// Shared CA phase of the CA+UR / CA+SA strategies. Returns case order
// (row indices ranked by phase-1 objective ascending, ties by row index).
struct CaPhase {
  CoveringArray ca;
  std::vector<ParamValuation> row_valuations;
  std::vector<int> ranked_rows;
};

CaPhase run_ca_phase(const ParameterSpace& space, Recorder& rec,
                     int ca_strength, const std::vector<int>& bins,
                     std::uint64_t seed) {
  if (bins.size() != space.continuous.size())
    throw std::invalid_argument("one bin count per continuous parameter required");
  std::vector<int> sizes = space.discrete_sizes();
  for (int b : bins) sizes.push_back(b);

  CaPhase phase;
  phase.ca = generate_covering_array(ca_strength, sizes, derive_seed(seed, 1));
  auto missing = verify_coverage(phase.ca);
  if (!missing.empty())
    throw std::logic_error("generated covering array fails verification");
  if (rec.total_sims <= static_cast<int>(phase.ca.rows.size()))
    throw std::invalid_argument(
        "budget must exceed the covering array size (" +
        std::to_string(phase.ca.rows.size()) + " rows)");

  std::vector<double> objectives;
  for (const auto& row : phase.ca.rows) {
    ParamValuation v;
    for (std::size_t p = 0; p < space.discrete.size(); ++p)
      v.discrete_choice[space.discrete[p].name] =
          static_cast<std::size_t>(row[p]);
    for (std::size_t c = 0; c < space.continuous.size(); ++c) {
      const auto& cp = space.continuous[c];
      auto centers = bin_centers(cp.lower, cp.upper, bins[c]);
      v.continuous_value[cp.name] = centers[row[space.discrete.size() + c]];
    }
    phase.row_valuations.push_back(v);
    objectives.push_back(rec.run(v));
  }

  phase.ranked_rows.resize(phase.ca.rows.size());
  std::iota(phase.ranked_rows.begin(), phase.ranked_rows.end(), 0);
  std::stable_sort(phase.ranked_rows.begin(), phase.ranked_rows.end(),
                   [&](int a, int b) { return objectives[a] < objectives[b]; });
  return phase;
}

}  // namespace

TrialResult run_ca_ur(const ParameterSpace& space, const EvalFn& eval,
                      const Objective& obj, const Budget& budget,
                      int ca_strength, const std::vector<int>& bins,
                      std::uint64_t seed) {
  Recorder rec(eval, obj, budget.total_sims);
  CaPhase phase = run_ca_phase(space, rec, ca_strength, bins, seed);
  std::mt19937_64 rng(derive_seed(seed, 2));

  std::size_t case_idx = 0;
  while (!rec.exhausted()) {
    int row = phase.ranked_rows[case_idx % phase.ranked_rows.size()];
    ++case_idx;
    ParamValuation base = phase.row_valuations[row];
    for (int it = 0; it < budget.per_case_cap && !rec.exhausted(); ++it) {
      ParamValuation v = base;
      for (const auto& c : space.continuous)
        v.continuous_value[c.name] =
            std::uniform_real_distribution<double>(c.lower, c.upper)(rng);
      rec.run(v);
    }
  }
  return rec.finish();
}

SaResult simulated_annealing(
    const std::vector<double>& init,
    const std::function<double(const std::vector<double>&)>& obj, int evals,
    const std::vector<std::pair<double, double>>& bounds, const SaParams& sa,
    std::uint64_t seed) {
  if (evals < 1) throw std::invalid_argument("evals must be >= 1");
  if (init.size() != bounds.size())
    throw std::invalid_argument("init/bounds dimension mismatch");
  for (std::size_t i = 0; i < init.size(); ++i)
    if (init[i] < bounds[i].first || init[i] > bounds[i].second)
      throw std::invalid_argument("init outside bounds");

  std::mt19937_64 rng(derive_seed(seed, 3));
  SaResult res;
  std::vector<double> x = init;
  double fx = obj(x);
  res.history.points.push_back(x);
  res.history.values.push_back(fx);
  res.best_point = x;
  res.best_value = fx;

  double alpha = 1.0;
  if (sa.t_initial > 0 && sa.t_final > 0 && evals > 1)
    alpha = std::pow(sa.t_final / sa.t_initial, 1.0 / (evals - 1));

  for (int m = 1; m < evals; ++m) {
    double temp = sa.t_initial > 0 ? sa.t_initial * std::pow(alpha, m) : 0.0;
    double anneal = sa.t_initial > 0 ? std::sqrt(temp / sa.t_initial) : 1.0;
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double width = bounds[i].second - bounds[i].first;
      double step = sa.step_fraction * width * anneal;
      double prop = x[i] + step * std::normal_distribution<double>(0, 1)(rng);
      y[i] = reflect_into(prop, bounds[i].first, bounds[i].second);
    }
    double fy = obj(y);
    res.history.points.push_back(y);
    res.history.values.push_back(fy);
    if (fy < res.best_value) {
      res.best_value = fy;
      res.best_point = y;
    }
    bool accept = fy <= fx;
    if (!accept && temp > 0) {
      double u = std::uniform_real_distribution<double>(0, 1)(rng);
      accept = u < std::exp(-(fy - fx) / temp);
    }
    if (accept) {
      x = std::move(y);
      fx = fy;
    }
  }
  return res;
}

TrialResult run_ca_sa(const ParameterSpace& space, const EvalFn& eval,
                      const Objective& obj, const Budget& budget,
                      int ca_strength, const std::vector<int>& bins,
                      const SaParams& sa, std::uint64_t seed) {
  Recorder rec(eval, obj, budget.total_sims);
  CaPhase phase = run_ca_phase(space, rec, ca_strength, bins, seed);

  std::vector<std::pair<double, double>> bounds;
  for (const auto& c : space.continuous) bounds.emplace_back(c.lower, c.upper);

  std::size_t case_idx = 0;
  while (!rec.exhausted()) {
    int row = phase.ranked_rows[case_idx % phase.ranked_rows.size()];
    ParamValuation base = phase.row_valuations[row];
    std::vector<double> init;
    for (const auto& c : space.continuous)
      init.push_back(base.continuous_value.at(c.name));
    int chunk = std::min(budget.per_case_cap,
                         rec.total_sims - rec.result.sims_used);
    auto case_obj = [&](const std::vector<double>& pt) {
      ParamValuation v = base;
      for (std::size_t i = 0; i < space.continuous.size(); ++i)
        v.continuous_value[space.continuous[i].name] = pt[i];
      return rec.run(v);
    };
    simulated_annealing(init, case_obj, chunk, bounds, sa,
                        derive_seed(seed, 100 + case_idx));
    ++case_idx;
  }
  return rec.finish();
}

}  // namespace falsitav
