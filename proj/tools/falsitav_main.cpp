#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "falsitav/covering.hpp"
#include "falsitav/experiment.hpp"
#include "falsitav/util.hpp"

namespace fs = std::filesystem;
using namespace falsitav;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

// --formula accepts either a file path or a literal formula string.
std::string formula_text(const std::string& arg) {
  if (fs::exists(arg)) return read_file(arg);
  return arg;
}

std::vector<int> parse_domains(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

ScenarioTemplate load_template(const std::string& arg,
                               const std::string& space_path) {
  if (arg == "builtin:urban-road" || arg.empty()) return urban_road_scenario();
  ScenarioTemplate t = ScenarioTemplate::from_json_string(read_file(arg));
  if (!space_path.empty())
    t.space = ParameterSpace::from_json_string(read_file(space_path));
  return t;
}

int cmd_monitor(const std::string& formula_arg, const std::string& trace_path,
                std::size_t index) {
  std::ifstream is(trace_path);
  if (!is) throw std::runtime_error("cannot open " + trace_path);
  Trace trace = Trace::from_csv(is);
  auto errs = validate_trace(trace);
  for (const auto& e : errs) std::cerr << "trace: " << e << "\n";
  if (!errs.empty()) return 1;
  const auto& names = trace.signal_names();
  auto phi = parse_formula(formula_text(formula_arg),
                           std::set<std::string>(names.begin(), names.end()));
  double rob = robustness(phi, trace, index);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", rob);
  std::cout << buf << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Requirement falsification toolkit: STL monitoring, covering "
               "arrays, and stochastic search over a closed-loop driving "
               "simulator"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = ".";

  // monitor
  auto* monitor = app.add_subcommand("monitor", "Evaluate STL robustness on a trace");
  std::string mon_formula, mon_trace;
  std::size_t mon_index = 0;
  monitor->add_option("--formula", mon_formula, "Formula file or literal string")->required();
  monitor->add_option("--trace", mon_trace, "Trace CSV")->required();
  monitor->add_option("--index", mon_index, "Sample index (default 0)");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one closed-loop simulation");
  std::string sim_scenario, sim_perception, sim_trace_out;
  double sim_dt = 0.05, sim_horizon = 30;
  simulate_cmd->add_option("--scenario", sim_scenario, "Scenario JSON (plain config)")->required();
  simulate_cmd->add_option("--perception", sim_perception, "Perception JSON");
  simulate_cmd->add_option("--trace-out", sim_trace_out, "Output trace CSV");
  simulate_cmd->add_option("--dt", sim_dt);
  simulate_cmd->add_option("--horizon", sim_horizon);
  simulate_cmd->add_option("--seed", seed);

  // cagen
  auto* cagen = app.add_subcommand("cagen", "Generate a covering array");
  int ca_strength = 2;
  std::string ca_domains, ca_out;
  cagen->add_option("--strength", ca_strength);
  cagen->add_option("--domains", ca_domains, "Comma-separated domain sizes");
  cagen->add_option("--seed", seed);
  cagen->add_option("--out", ca_out, "Output CSV");
  auto* cagen_verify = cagen->add_subcommand("verify", "Verify coverage of an array CSV");
  std::string cav_in, cav_domains;
  int cav_strength = 2;
  cagen_verify->add_option("--in", cav_in)->required();
  cagen_verify->add_option("--strength", cav_strength);
  cagen_verify->add_option("--domains", cav_domains, "Override inferred domain sizes");
  cagen->require_subcommand(0, 1);

  // falsify
  auto* falsify_cmd = app.add_subcommand("falsify", "Run one test-generation strategy");
  std::string f_strategy = "ur", f_scenario = "builtin:urban-road", f_space, f_spec, f_out = "results.csv";
  int f_budget = 200, f_trials = 1, f_cap = 50;
  falsify_cmd->add_option("--strategy", f_strategy, "ur | ca-ur | ca-sa");
  falsify_cmd->add_option("--scenario", f_scenario, "Template JSON or builtin:urban-road");
  falsify_cmd->add_option("--space", f_space, "Parameter space JSON override");
  falsify_cmd->add_option("--spec", f_spec, "STL spec file (default: built-in collision spec)");
  falsify_cmd->add_option("--budget", f_budget);
  falsify_cmd->add_option("--per-case-cap", f_cap);
  falsify_cmd->add_option("--trials", f_trials);
  falsify_cmd->add_option("--seed", seed);
  falsify_cmd->add_option("--jobs", jobs);
  falsify_cmd->add_option("--out", f_out);

  // experiment
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a full experiment config");
  std::string e_config, e_scenario = "builtin:urban-road";
  experiment_cmd->add_option("--config", e_config, "Experiment JSON")->required();
  experiment_cmd->add_option("--scenario", e_scenario, "Template JSON or builtin:urban-road");
  experiment_cmd->add_option("--jobs", jobs);
  experiment_cmd->add_option("--out-dir", out_dir);

  // ode-bench
  auto* ode_cmd = app.add_subcommand("ode-bench", "Robustness landscape of the benchmark ODE");
  double ode_step = 0.05, ode_duration = 2.0, ode_dt = 0.005;
  std::string ode_out = "landscape.csv";
  ode_cmd->add_option("--grid-step", ode_step);
  ode_cmd->add_option("--duration", ode_duration);
  ode_cmd->add_option("--dt", ode_dt);
  ode_cmd->add_option("--out", ode_out);
  ode_cmd->add_option("--jobs", jobs);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*monitor) return cmd_monitor(mon_formula, mon_trace, mon_index);

    if (*simulate_cmd) {
      ScenarioConfig cfg = sim_scenario == "builtin:urban-road"
                               ? urban_road_scenario().base
                               : ScenarioConfig::from_json_string(
                                     read_file(sim_scenario));
      PerceptionParams pp;
      if (!sim_perception.empty())
        pp = PerceptionParams::from_json_string(read_file(sim_perception));
      SimOutcome out = simulate(cfg, pp, sim_dt, sim_horizon, seed);
      if (!sim_trace_out.empty()) {
        std::ofstream os(sim_trace_out);
        out.trace.to_csv(os);
      }
      std::cout << "steps=" << out.steps << " collision=" << (out.collision ? 1 : 0);
      if (out.collision) std::cout << " collision_speed=" << out.collision_speed;
      std::cout << "\n";
      return 0;
    }

    if (*cagen_verify) {
      CoveringArray ca = covering_array_from_csv(read_file(cav_in), cav_strength);
      if (!cav_domains.empty()) ca.domains = parse_domains(cav_domains);
      auto missing = verify_coverage(ca);
      if (missing.empty()) {
        std::cout << "COVERED\n";
        return 0;
      }
      for (const auto& m : missing) std::cout << "missing: " << m.to_string() << "\n";
      return 1;
    }
    if (*cagen) {
      if (ca_domains.empty())
        throw std::invalid_argument("cagen: --domains is required");
      auto domains = parse_domains(ca_domains);
      CoveringArray ca = generate_covering_array(ca_strength, domains, seed);
      std::string csv = covering_array_to_csv(ca);
      if (!ca_out.empty())
        write_file(ca_out, csv);
      else
        std::cout << csv;
      std::cerr << "rows=" << ca.rows.size() << " combinations="
                << count_t_way_combinations(ca_strength, domains) << "\n";
      return 0;
    }

    if (*falsify_cmd) {
      ScenarioTemplate tmpl = load_template(f_scenario, f_space);
      ExperimentConfig config;
      config.strategies = {f_strategy};
      config.budget = {f_budget, f_cap, f_trials};
      config.base_seed = seed;
      config.jobs = jobs;
      if (!f_spec.empty()) config.spec_text = read_file(f_spec);
      ExperimentReport report = run_experiment(config, tmpl);
      write_file(f_out, report.results_csv);
      const auto& s = report.per_strategy[0];
      std::cout << "strategy=" << s.strategy << " trials=" << s.trial_minima.size()
                << " mean_best=" << s.mean_best << "\n";
      return 0;
    }

    if (*experiment_cmd) {
      ExperimentConfig config = ExperimentConfig::from_json_string(read_file(e_config));
      if (jobs > 1) config.jobs = jobs;
      ScenarioTemplate tmpl = load_template(e_scenario, "");
      ExperimentReport report = run_experiment(config, tmpl);
      fs::create_directories(out_dir);
      write_file((fs::path(out_dir) / "results.csv").string(), report.results_csv);
      write_file((fs::path(out_dir) / "summary.csv").string(), report.summary_csv);
      write_file((fs::path(out_dir) / "histogram.csv").string(), report.histogram_csv);
      std::cout << report.summary_csv;
      if (config.mode == "falsify" && report.violation_found) {
        std::cout << "bug found: robustness < 0\n";
        return 2;
      }
      return 0;
    }

    if (*ode_cmd) {
      auto grid = ode_grid(-1.0, 1.0, ode_step);
      auto t0 = std::chrono::steady_clock::now();
      auto rob = jobs > 1 ? ode_landscape_parallel(grid, ode_duration, ode_dt)
                          : ode_landscape_serial(grid, ode_duration, ode_dt);
      auto t1 = std::chrono::steady_clock::now();
      std::ostringstream os;
      os << "x1,x2,robustness\n";
      for (std::size_t i = 0; i < grid.size(); ++i)
        os << format_double(grid[i][0]) << ',' << format_double(grid[i][1])
           << ',' << format_double(rob[i]) << '\n';
      write_file(ode_out, os.str());
      int negative = static_cast<int>(std::count_if(
          rob.begin(), rob.end(), [](double r) { return r < 0; }));
      std::cout << "points=" << grid.size() << " negative=" << negative
                << " elapsed_ms="
                << std::chrono::duration<double, std::milli>(t1 - t0).count()
                << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
