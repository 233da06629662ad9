#include <cmath>

#include "falsitav/sim.hpp"

namespace falsitav {

namespace {

std::array<double, 2> ode_rhs(double t, const std::array<double, 2>& x) {
  const double pi = 3.14159265358979323846;
  return {x[0] - x[1] + 0.1 * t,
          x[1] * std::cos(2 * pi * x[1]) - x[0] * std::sin(2 * pi * x[0]) +
              0.1 * t};
}

}  // namespace

Trace simulate_ode_example(std::array<double, 2> x0, double duration,
                           double dt) {
  if (dt > 0.01 || dt <= 0) throw SimError("ode dt must be in (0, 0.01]");
  if (duration > 10 || duration <= 0)
    throw SimError("ode duration must be in (0, 10]");

  Trace trace(std::vector<std::string>{"x1", "x2"});
  std::array<double, 2> x = x0;
  int n = static_cast<int>(std::llround(duration / dt));
  for (int i = 0;; ++i) {
    double t = i * dt;
    if (std::abs(x[0]) > 1e6 || std::abs(x[1]) > 1e6)
      throw SimError("ode state diverged past 1e6");
    trace.push_back(t, {x[0], x[1]});
    if (i >= n) break;

    auto k1 = ode_rhs(t, x);
    std::array<double, 2> x2{x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]};
    auto k2 = ode_rhs(t + 0.5 * dt, x2);
    std::array<double, 2> x3{x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]};
    auto k3 = ode_rhs(t + 0.5 * dt, x3);
    std::array<double, 2> x4{x[0] + dt * k3[0], x[1] + dt * k3[1]};
    auto k4 = ode_rhs(t + dt, x4);
    x[0] += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    x[1] += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return trace;
}

FormulaPtr ode_box_avoidance_spec() {
  const char* text =
      "always not (x1 >= -1.6 and x1 <= -1.4 and x2 >= -1.1 and x2 <= -0.9)"
      " and "
      "always not (x1 >= 3.4 and x1 <= 3.6 and x2 >= -1.2 and x2 <= -0.8)";
  return parse_formula(text, {"x1", "x2"});
}

std::vector<std::array<double, 2>> ode_grid(double lo, double hi, double step) {
  std::vector<std::array<double, 2>> pts;
  int n = static_cast<int>(std::llround((hi - lo) / step));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      pts.push_back({lo + i * step, lo + j * step});
  return pts;
}

std::vector<double> ode_landscape_serial(
    const std::vector<std::array<double, 2>>& grid, double duration,
    double dt) {
  auto spec = ode_box_avoidance_spec();
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Trace t = simulate_ode_example(grid[i], duration, dt);
    out[i] = robustness(spec, t, 0);
  }
  return out;
}

std::vector<double> ode_landscape_parallel(
    const std::vector<std::array<double, 2>>& grid, double duration,
    double dt) {
  auto spec = ode_box_avoidance_spec();
  std::vector<double> out(grid.size());
  std::int64_t n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Trace t = simulate_ode_example(grid[i], duration, dt);
    out[i] = robustness(spec, t, 0);
  }
  return out;
}

}  // namespace falsitav
