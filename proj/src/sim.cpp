#include "falsitav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "falsitav/util.hpp"
#include "json.hpp"

namespace falsitav {

namespace {

constexpr double kPedestrianRadius = 0.3;
constexpr double kAgentDecel = 4.0;       // stopping-vehicle braking, m/s^2
constexpr double kStopLineGap = 2.0;      // m before the crosswalk
constexpr double kObjectHalfWidthGuess = 0.8;  // corridor widening for point detections

// Preset half length/width per vehicle model.
constexpr double kModelHalfLen[kVehicleModelCount] = {2.25, 2.10, 2.50, 1.90, 2.75};
constexpr double kModelHalfWid[kVehicleModelCount] = {0.90, 0.875, 0.95, 0.85, 1.00};
constexpr double kModelMissMult[kVehicleModelCount] = {1.0, 1.1, 0.9, 1.2, 1.05};

constexpr double kColorBrightness[kColorCount] = {0.45, 0.55, 0.35, 1.0, 0.0};

const char* kAgentKindNames[] = {"parked_vehicle", "stopping_vehicle",
                                 "crosswalk_pedestrian",
                                 "jaywalking_pedestrian"};
const char* kColorNames[] = {"red", "green", "blue", "white", "black"};

}  // namespace

const char* to_string(AgentKind k) {
  return kAgentKindNames[static_cast<int>(k)];
}
const char* to_string(Color c) { return kColorNames[static_cast<int>(c)]; }

AgentKind agent_kind_from_string(const std::string& s) {
  for (int i = 0; i < 4; ++i)
    if (s == kAgentKindNames[i]) return static_cast<AgentKind>(i);
  throw SimError("unknown agent kind: " + s);
}

Color color_from_string(const std::string& s) {
  for (int i = 0; i < kColorCount; ++i)
    if (s == kColorNames[i]) return static_cast<Color>(i);
  throw SimError("unknown color: " + s);
}

double lane_center_y(const RoadConfig& road, int lane) {
  return (lane - (road.lane_count - 1) / 2.0) * road.lane_width;
}

std::string ScenarioConfig::to_json_string() const {
  nlohmann::json j;
  j["ego"] = {{"init_longitudinal_position", ego.init_longitudinal_position},
              {"init_speed", ego.init_speed},
              {"lane", ego.lane}};
  j["fog"] = fog;
  j["road"] = {{"lane_count", road.lane_count},
               {"lane_width", road.lane_width},
               {"crosswalk_position", road.crosswalk_position},
               {"length", road.length}};
  j["agents"] = nlohmann::json::array();
  for (const auto& a : agents) {
    j["agents"].push_back({{"kind", to_string(a.kind)},
                           {"model", a.model},
                           {"color", to_string(a.color)},
                           {"color2", to_string(a.color2)},
                           {"longitudinal_position", a.longitudinal_position},
                           {"lateral_offset", a.lateral_offset},
                           {"speed", a.speed}});
  }
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ScenarioConfig cfg;
  if (j.contains("ego")) {
    const auto& e = j["ego"];
    cfg.ego.init_longitudinal_position =
        e.value("init_longitudinal_position", 0.0);
    cfg.ego.init_speed = e.value("init_speed", 0.0);
    cfg.ego.lane = e.value("lane", 1);
  }
  cfg.fog = j.value("fog", false);
  if (j.contains("road")) {
    const auto& r = j["road"];
    cfg.road.lane_count = r.value("lane_count", 3);
    cfg.road.lane_width = r.value("lane_width", 3.5);
    cfg.road.crosswalk_position = r.value("crosswalk_position", 80.0);
    cfg.road.length = r.value("length", 200.0);
  }
  for (const auto& a : j.value("agents", nlohmann::json::array())) {
    AgentConfig ac;
    ac.kind = agent_kind_from_string(a.at("kind").get<std::string>());
    ac.model = a.value("model", 0);
    ac.color = color_from_string(a.value("color", std::string("red")));
    ac.color2 = color_from_string(a.value("color2", std::string("red")));
    ac.longitudinal_position = a.value("longitudinal_position", 0.0);
    ac.lateral_offset = a.value("lateral_offset", 0.0);
    ac.speed = a.value("speed", 0.0);
    cfg.agents.push_back(ac);
  }
  return cfg;
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.road.lane_count < 1) errs.push_back("road.lane_count must be >= 1");
  if (cfg.road.lane_width <= 0) errs.push_back("road.lane_width must be > 0");
  if (cfg.ego.lane < 0 || cfg.ego.lane >= cfg.road.lane_count)
    errs.push_back("ego.lane outside road");
  if (cfg.ego.init_speed < 0) errs.push_back("ego.init_speed must be >= 0");
  if (cfg.ego.init_longitudinal_position < 0 ||
      cfg.ego.init_longitudinal_position > cfg.road.length)
    errs.push_back("ego position outside road extent");
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    const auto& a = cfg.agents[i];
    std::string tag = "agents[" + std::to_string(i) + "]";
    if (a.model < 0 || a.model >= kVehicleModelCount)
      errs.push_back(tag + ".model out of range");
    if (a.speed < 0) errs.push_back(tag + ".speed must be >= 0");
    if (a.longitudinal_position < 0 || a.longitudinal_position > cfg.road.length)
      errs.push_back(tag + " position outside road extent");
  }
  return errs;
}

// ---------------------------------------------------------------------------
// Perception
// ---------------------------------------------------------------------------

std::string PerceptionParams::to_json_string() const {
  nlohmann::json j = {{"base_miss_rate", base_miss_rate},
                      {"fog_miss_multiplier", fog_miss_multiplier},
                      {"contrast_gamma", contrast_gamma},
                      {"max_detection_range", max_detection_range},
                      {"position_noise_std", position_noise_std},
                      {"seed_stream", seed_stream}};
  return j.dump(2);
}

PerceptionParams PerceptionParams::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PerceptionParams pp;
  pp.base_miss_rate = j.value("base_miss_rate", 0.0);
  pp.fog_miss_multiplier = j.value("fog_miss_multiplier", 1.5);
  pp.contrast_gamma = j.value("contrast_gamma", 1.5);
  pp.max_detection_range = j.value("max_detection_range", 100.0);
  pp.position_noise_std = j.value("position_noise_std", 0.0);
  pp.seed_stream = j.value("seed_stream", 0ull);
  return pp;
}

double miss_probability(const PerceptionParams& pp, const SceneObject& obj,
                        bool fog) {
  double brightness;
  if (obj.cls == ObjClass::Pedestrian) {
    brightness = 0.5 * (kColorBrightness[static_cast<int>(obj.color)] +
                        kColorBrightness[static_cast<int>(obj.color2)]);
  } else {
    brightness = kColorBrightness[static_cast<int>(obj.color)];
  }
  double background = fog ? 0.9 : 0.15;
  double contrast = 1.0 + pp.contrast_gamma * (1.0 - std::abs(brightness - background));
  double model_mult =
      obj.cls == ObjClass::Vehicle ? kModelMissMult[obj.model] : 1.0;
  double p = pp.base_miss_rate * contrast * model_mult;
  if (fog) p *= pp.fog_miss_multiplier;
  return std::clamp(p, 0.0, 0.95);
}

std::vector<Detection> perceive(const std::vector<SceneObject>& scene,
                                const PerceptionParams& pp, bool fog,
                                const EgoState& ego, std::mt19937_64& rng) {
  std::vector<Detection> out;
  out.reserve(scene.size());
  double c = std::cos(ego.heading), s = std::sin(ego.heading);
  for (const auto& obj : scene) {
    // fixed per-object draw count so the stream stays aligned
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double nx = gauss(rng), ny = gauss(rng);

    Vec2 d = obj.pos - ego.pos;
    Vec2 rel{d.x * c + d.y * s, -d.x * s + d.y * c};
    Detection det;
    det.object_id = obj.id;
    det.cls = obj.cls;
    double range = rel.norm();
    bool in_range = range <= pp.max_detection_range;
    det.detected = in_range && u >= miss_probability(pp, obj, fog);
    det.rel_pos = {rel.x + pp.position_noise_std * nx,
                   rel.y + pp.position_noise_std * ny};
    out.push_back(det);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Controller
// ---------------------------------------------------------------------------

ControlOutput control(const std::vector<Detection>& detections,
                      TrackerState& tracker, const EgoState& ego, double time,
                      double target_lane_y, const ControlParams& cp,
                      const VehicleParams& vp) {
  double c = std::cos(ego.heading), s = std::sin(ego.heading);
  Vec2 fwd{c, s};

  bool danger = false;
  double min_ttc = std::numeric_limits<double>::infinity();
  double danger_lat = 0;

  for (const auto& det : detections) {
    if (!det.detected) continue;
    Vec2 world = ego.pos + Vec2{det.rel_pos.x * c - det.rel_pos.y * s,
                                det.rel_pos.x * s + det.rel_pos.y * c};
    Vec2 vel{0, 0};
    auto it = tracker.tracks.find(det.object_id);
    if (it != tracker.tracks.end() && time > it->second.last_time) {
      double dt = time - it->second.last_time;
      vel = (world - it->second.last_world) * (1.0 / dt);
      it->second.vel = vel;
      it->second.has_vel = true;
      it->second.last_world = world;
      it->second.last_time = time;
    } else if (it == tracker.tracks.end()) {
      tracker.tracks[det.object_id] = {world, time, {0, 0}, false};
    }

    // constant-velocity extrapolation of both ego and object
    double lat_limit = vp.half_wid + cp.corridor_margin + kObjectHalfWidthGuess;
    for (double tau = 0.0; tau <= cp.lookahead + 1e-9; tau += 0.1) {
      Vec2 obj_w = world + vel * tau;
      Vec2 ego_w = ego.pos + fwd * (ego.speed * tau);
      Vec2 d = obj_w - ego_w;
      double lon = d.x * c + d.y * s - vp.half_len;  // ahead of the bumper
      double lat = -d.x * s + d.y * c;
      if (std::abs(lat) <= lat_limit && lon > -2.0 && lon < cp.d_brake) {
        double closing = std::max(0.1, ego.speed - vel.dot(fwd));
        double ttc = std::max(0.0, lon) / closing;
        if (ttc < min_ttc) {
          min_ttc = ttc;
          danger_lat = lat;
        }
        danger = true;
        break;
      }
    }
  }

  ControlOutput out;
  if (danger) {
    out.throttle = 0;
    out.brake = 1;
    if (min_ttc < cp.ttc_steer)
      out.steering = danger_lat >= 0 ? -cp.steer_mag : cp.steer_mag;
    else
      out.steering = 0;
  } else {
    out.throttle = cp.theta_const;
    out.brake = 0;
    out.steering = std::clamp(
        -0.6 * ego.heading - 0.02 * (ego.pos.y - target_lane_y), -0.4, 0.4);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spec signals
// ---------------------------------------------------------------------------

SpecSignals extract_spec_signals(const EgoState& ego,
                                 const std::vector<SceneObject>& objects,
                                 const ControlParams& cp,
                                 const VehicleParams& vp) {
  SpecSignals out;
  out.v_ego = ego.speed;
  double c = std::cos(ego.heading), s = std::sin(ego.heading);
  Vec2 fwd{c, s}, left{-s, c};
  Vec2 bumper_mid = ego.pos + fwd * vp.half_len;
  Vec2 ba = bumper_mid + left * vp.half_wid;
  Vec2 bb = bumper_mid - left * vp.half_wid;

  OBB corridor;
  corridor.center = bumper_mid + fwd * (cp.corridor_length / 2);
  corridor.heading = ego.heading;
  corridor.half_len = cp.corridor_length / 2;
  corridor.half_wid = vp.half_wid + cp.corridor_margin;

  for (const auto& obj : objects) {
    double dist;
    bool in_front;
    if (obj.cls == ObjClass::Pedestrian) {
      dist = segment_point_distance(ba, bb, obj.pos) - obj.radius;
      in_front = disc_obb_overlap(obj.pos, obj.radius, corridor);
    } else {
      OBB box{obj.pos, obj.heading, obj.half_len, obj.half_wid};
      dist = segment_obb_distance(ba, bb, box);
      in_front = obb_overlap(box, corridor);
    }
    out.dist.push_back(dist);
    out.front.push_back(in_front ? kBoolSaturation : -kBoolSaturation);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed-loop simulation
// ---------------------------------------------------------------------------

namespace {

struct AgentState {
  Vec2 pos;
  double speed = 0;
  int phase = 0;  // jaywalker: 0 crossing, 1 returning, 2 done
};

SceneObject make_scene_object(int id, const AgentConfig& cfg,
                              const AgentState& st) {
  SceneObject o;
  o.id = id;
  o.pos = st.pos;
  o.color = cfg.color;
  o.color2 = cfg.color2;
  o.model = cfg.model;
  if (cfg.kind == AgentKind::CrosswalkPedestrian ||
      cfg.kind == AgentKind::JaywalkingPedestrian) {
    o.cls = ObjClass::Pedestrian;
    o.radius = kPedestrianRadius;
  } else {
    o.cls = ObjClass::Vehicle;
    o.half_len = kModelHalfLen[cfg.model];
    o.half_wid = kModelHalfWid[cfg.model];
  }
  return o;
}

void step_agent(const AgentConfig& cfg, AgentState& st,
                const RoadConfig& road, double dt) {
  switch (cfg.kind) {
    case AgentKind::ParkedVehicle:
      break;
    case AgentKind::StoppingVehicle: {
      double stop_line = road.crosswalk_position - kStopLineGap;
      double front = st.pos.x + kModelHalfLen[cfg.model];
      double brake_dist = st.speed * st.speed / (2 * kAgentDecel);
      if (stop_line - front <= brake_dist)
        st.speed = std::max(0.0, st.speed - kAgentDecel * dt);
      st.pos.x += st.speed * dt;
      break;
    }
    case AgentKind::CrosswalkPedestrian: {
      double target = -cfg.lateral_offset;  // opposite sidewalk
      double dir = cfg.lateral_offset > 0 ? -1.0 : 1.0;
      if (st.phase == 0) {
        st.pos.y += dir * cfg.speed * dt;
        if ((dir > 0 && st.pos.y >= target) || (dir < 0 && st.pos.y <= target)) {
          st.pos.y = target;
          st.phase = 2;
        }
      }
      break;
    }
    case AgentKind::JaywalkingPedestrian: {
      // crosses leftward until the leftmost lane, then turns back
      double turn_y = lane_center_y(road, road.lane_count - 1);
      if (st.phase == 0) {
        st.pos.y += cfg.speed * dt;
        if (st.pos.y >= turn_y) st.phase = 1;
      } else if (st.phase == 1) {
        st.pos.y -= cfg.speed * dt;
        if (st.pos.y <= cfg.lateral_offset) {
          st.pos.y = cfg.lateral_offset;
          st.phase = 2;
        }
      }
      break;
    }
  }
}

}  // namespace

SimOutcome simulate(const ScenarioConfig& cfg, const PerceptionParams& pp,
                    double dt, double horizon, std::uint64_t seed,
                    const ControlParams& cp, const VehicleParams& vp) {
  if (!(dt > 0 && dt <= 0.1)) throw SimError("dt must be in (0, 0.1]");
  if (horizon > 120) throw SimError("horizon must be <= 120 s");
  auto errs = validate_scenario(cfg);
  if (!errs.empty()) throw SimError("invalid scenario: " + errs[0]);

  std::size_t l = cfg.agents.size();
  std::vector<std::string> names = {"v_ego", "ego_x", "ego_y", "ego_heading"};
  for (std::size_t i = 1; i <= l; ++i) names.push_back("dist_" + std::to_string(i));
  for (std::size_t i = 1; i <= l; ++i) names.push_back("front_" + std::to_string(i));
  for (std::size_t i = 1; i <= l; ++i) {
    names.push_back("obj" + std::to_string(i) + "_x");
    names.push_back("obj" + std::to_string(i) + "_y");
  }

  SimOutcome out;
  out.trace = Trace(names);

  EgoState ego;
  ego.pos = {cfg.ego.init_longitudinal_position,
             lane_center_y(cfg.road, cfg.ego.lane)};
  ego.speed = cfg.ego.init_speed;
  double target_y = ego.pos.y;

  std::vector<AgentState> agents(l);
  for (std::size_t i = 0; i < l; ++i) {
    agents[i].pos = {cfg.agents[i].longitudinal_position,
                     cfg.agents[i].lateral_offset};
    agents[i].speed = cfg.agents[i].speed;
  }

  std::mt19937_64 rng(derive_seed(seed, pp.seed_stream));
  TrackerState tracker;

  int n_steps = static_cast<int>(std::llround(horizon / dt));
  for (int step = 0;; ++step) {
    double t = step * dt;
    std::vector<SceneObject> scene;
    scene.reserve(l);
    for (std::size_t i = 0; i < l; ++i)
      scene.push_back(make_scene_object(static_cast<int>(i) + 1, cfg.agents[i],
                                        agents[i]));

    SpecSignals sig = extract_spec_signals(ego, scene, cp, vp);
    std::vector<double> row = {sig.v_ego, ego.pos.x, ego.pos.y, ego.heading};
    row.insert(row.end(), sig.dist.begin(), sig.dist.end());
    row.insert(row.end(), sig.front.begin(), sig.front.end());
    for (const auto& o : scene) {
      row.push_back(o.pos.x);
      row.push_back(o.pos.y);
    }
    out.trace.push_back(t, row);

    bool hit = std::any_of(sig.dist.begin(), sig.dist.end(),
                           [](double d) { return d < 0; });
    if (hit) {
      out.collision = true;
      out.collision_speed = ego.speed;
      break;
    }
    if (step >= n_steps) break;

    auto dets = perceive(scene, pp, cfg.fog, ego, rng);
    ControlOutput u = control(dets, tracker, ego, t, target_y, cp, vp);

    double accel = vp.a_throttle * u.throttle - vp.a_max * u.brake -
                   vp.drag * ego.speed;
    accel = std::max(accel, -vp.a_max);
    ego.speed = std::clamp(ego.speed + accel * dt, 0.0, vp.speed_cap);
    ego.pos = ego.pos + Vec2{std::cos(ego.heading), std::sin(ego.heading)} *
                            (ego.speed * dt);
    ego.heading += ego.speed / vp.wheelbase * std::tan(u.steering) * dt;

    for (std::size_t i = 0; i < l; ++i)
      step_agent(cfg.agents[i], agents[i], cfg.road, dt);
    out.steps = step + 1;
  }
  return out;
}

std::string collision_spec_text(int object_count, double eps_speed,
                                double eps_dist) {
  std::ostringstream os;
  os << "always ((v_ego - " << eps_speed << " > 0) -> (";
  for (int i = 1; i <= object_count; ++i) {
    if (i > 1) os << " and ";
    os << "not (dist_" << i << " < " << eps_dist << " and front_" << i
       << " >= 0) and not (dist_" << i << " < 0)";
  }
  os << "))";
  return os.str();
}

}  // namespace falsitav
