// Compares the serial reference implementations against the OpenMP
// kernels: ODE robustness landscape sweep and the experiment cell pool.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "falsitav/experiment.hpp"

using namespace falsitav;
using clk = std::chrono::steady_clock;

static double ms_since(clk::time_point t0) {
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : 4;

  auto grid = ode_grid(-1.0, 1.0, 0.05);
  auto t0 = clk::now();
  auto serial = ode_landscape_serial(grid, 2.0, 0.005);
  double serial_ms = ms_since(t0);
  t0 = clk::now();
  auto parallel = ode_landscape_parallel(grid, 2.0, 0.005);
  double parallel_ms = ms_since(t0);
  bool match = serial == parallel;
  std::printf("ode-landscape  points=%zu  serial=%.1fms  parallel=%.1fms  "
              "speedup=%.2fx  identical=%s\n",
              grid.size(), serial_ms, parallel_ms, serial_ms / parallel_ms,
              match ? "yes" : "NO");

  ExperimentConfig config;
  config.strategies = {"ur"};
  config.budget = {40, 50, 4};
  config.dt = 0.1;
  config.horizon = 20;
  ScenarioTemplate tmpl = urban_road_scenario();

  config.jobs = 1;
  t0 = clk::now();
  auto rep1 = run_experiment(config, tmpl);
  double exp_serial_ms = ms_since(t0);
  config.jobs = threads;
  t0 = clk::now();
  auto repN = run_experiment(config, tmpl);
  double exp_par_ms = ms_since(t0);
  std::printf("experiment     cells=%d    serial=%.1fms  parallel(%d)=%.1fms  "
              "speedup=%.2fx  identical=%s\n",
              config.budget.trials, exp_serial_ms, threads, exp_par_ms,
              exp_serial_ms / exp_par_ms,
              rep1.summary_csv == repN.summary_csv ? "yes" : "NO");
  return match ? 0 : 1;
}
