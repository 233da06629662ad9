#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "falsitav/geometry.hpp"
#include "falsitav/stl.hpp"
#include "falsitav/trace.hpp"

namespace falsitav {

enum class AgentKind {
  ParkedVehicle,
  StoppingVehicle,
  CrosswalkPedestrian,
  JaywalkingPedestrian,
};

enum class Color { Red, Green, Blue, White, Black };
inline constexpr int kColorCount = 5;
inline constexpr int kVehicleModelCount = 5;

const char* to_string(AgentKind k);
const char* to_string(Color c);
AgentKind agent_kind_from_string(const std::string& s);
Color color_from_string(const std::string& s);

struct AgentConfig {
  AgentKind kind = AgentKind::ParkedVehicle;
  int model = 0;            // vehicles: index into preset length/width table
  Color color = Color::Red;
  Color color2 = Color::Red;  // pedestrians: pants (color = shirt)
  double longitudinal_position = 0;
  double lateral_offset = 0;  // world y of the agent
  double speed = 0;           // m/s, where applicable
};

struct EgoConfig {
  double init_longitudinal_position = 0;
  double init_speed = 0;
  int lane = 1;
};

struct RoadConfig {
  int lane_count = 3;
  double lane_width = 3.5;
  double crosswalk_position = 80;
  double length = 200;
};

struct ScenarioConfig {
  EgoConfig ego;
  std::vector<AgentConfig> agents;
  bool fog = false;
  RoadConfig road;

  std::string to_json_string() const;
  static ScenarioConfig from_json_string(const std::string& text);
};

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

// Lane center y for lane index i (0 = rightmost).
double lane_center_y(const RoadConfig& road, int lane);

// Surrogate perception: per-frame independent misses whose probability
// depends on fog, object color contrast against the background, and the
// vehicle model; detected positions carry Gaussian noise.
struct PerceptionParams {
  double base_miss_rate = 0.0;
  double fog_miss_multiplier = 1.5;
  double contrast_gamma = 1.5;
  double max_detection_range = 100.0;
  double position_noise_std = 0.0;
  std::uint64_t seed_stream = 0;

  std::string to_json_string() const;
  static PerceptionParams from_json_string(const std::string& text);
};

enum class ObjClass { Vehicle, Pedestrian };

// Ground-truth scene element handed to the surrogate perception.
struct SceneObject {
  int id = 0;
  ObjClass cls = ObjClass::Vehicle;
  Vec2 pos;          // world frame
  double heading = 0;
  double half_len = 0, half_wid = 0;  // vehicles
  double radius = 0;                  // pedestrians
  Color color = Color::Red;
  Color color2 = Color::Red;
  int model = 0;
};

struct Detection {
  int object_id = 0;
  Vec2 rel_pos;  // ego frame: x forward, y left
  ObjClass cls = ObjClass::Vehicle;
  bool detected = false;
};

struct EgoState {
  Vec2 pos;
  double heading = 0;
  double speed = 0;
};

// Per-frame miss probability for one object, clamped to [0, 0.95].
double miss_probability(const PerceptionParams& pp, const SceneObject& obj,
                        bool fog);

std::vector<Detection> perceive(const std::vector<SceneObject>& scene,
                                const PerceptionParams& pp, bool fog,
                                const EgoState& ego, std::mt19937_64& rng);

struct ControlParams {
  double d_brake = 15.0;
  double ttc_steer = 1.0;
  double theta_const = 0.75;   // equilibrium cruise ~15 m/s
  double lookahead = 2.0;      // s, constant-velocity extrapolation window
  double steer_mag = 0.3;      // rad, evasive steering magnitude
  double corridor_margin = 0.3;
  double corridor_length = 30.0;
};

struct VehicleParams {
  double wheelbase = 2.8;
  double a_max = 8.0;
  double a_throttle = 8.0;
  double drag = 0.4;       // 1/s, linear speed drag
  double speed_cap = 20.0;
  double half_len = 2.2;
  double half_wid = 0.9;
};

struct TrackedObject {
  Vec2 last_world;
  double last_time = 0;
  Vec2 vel;
  bool has_vel = false;
};

struct TrackerState {
  std::map<int, TrackedObject> tracks;
};

struct ControlOutput {
  double throttle = 0;
  double brake = 0;
  double steering = 0;
};

// Collision-avoidance controller: constant throttle unless an extrapolated
// detection intrudes into the front corridor within d_brake, then full
// brake; steers away as well when the time to collision drops under
// ttc_steer.
ControlOutput control(const std::vector<Detection>& detections,
                      TrackerState& tracker, const EgoState& ego, double time,
                      double target_lane_y, const ControlParams& cp = {},
                      const VehicleParams& vp = {});

struct SpecSignals {
  double v_ego = 0;
  std::vector<double> dist;   // per object, bumper to object hull
  std::vector<double> front;  // +/- kBoolSaturation
};

SpecSignals extract_spec_signals(const EgoState& ego,
                                 const std::vector<SceneObject>& objects,
                                 const ControlParams& cp = {},
                                 const VehicleParams& vp = {});

struct SimOutcome {
  Trace trace;
  bool collision = false;
  double collision_speed = 0;
  int steps = 0;

  SimOutcome() : trace(std::vector<std::string>{}) {}
};

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed loop: ground-truth scene -> surrogate perception -> controller ->
// kinematic integration, sampled every dt; halts early on collision with the
// trailing sample recorded. Deterministic for fixed (cfg, pp, dt, seed).
SimOutcome simulate(const ScenarioConfig& cfg, const PerceptionParams& pp,
                    double dt, double horizon, std::uint64_t seed,
                    const ControlParams& cp = {}, const VehicleParams& vp = {});

// STL text of the collision specification for `count` scene objects, over
// signals v_ego, dist_i, front_i.
std::string collision_spec_text(int object_count, double eps_speed = 0.5,
                                double eps_dist = 0.5);

// RK4 integration of the two-state benchmark ODE; trace signals x1, x2.
// Throws SimError if the state diverges past 1e6.
Trace simulate_ode_example(std::array<double, 2> x0, double duration,
                           double dt);

// Two-box avoidance specification over x1, x2.
FormulaPtr ode_box_avoidance_spec();

// Grid of initial conditions with the given step over [lo, hi]^2.
std::vector<std::array<double, 2>> ode_grid(double lo, double hi, double step);

// Robustness of the box-avoidance spec for each initial condition.
// Serial reference and OpenMP versions produce identical results.
std::vector<double> ode_landscape_serial(
    const std::vector<std::array<double, 2>>& grid, double duration, double dt);
std::vector<double> ode_landscape_parallel(
    const std::vector<std::array<double, 2>>& grid, double duration, double dt);

}  // namespace falsitav
