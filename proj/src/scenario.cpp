#include "falsitav/scenario.hpp"

#include <cstdlib>

#include "json.hpp"

namespace falsitav {

namespace {

// Parses "agents[3].color"-style paths.
struct Path {
  bool is_agent = false;
  std::size_t agent_index = 0;
  std::string field;
};

Path parse_path(const std::string& path) {
  Path p;
  if (path.rfind("agents[", 0) == 0) {
    std::size_t close = path.find(']');
    if (close == std::string::npos || close + 1 >= path.size() ||
        path[close + 1] != '.')
      throw SimError("bad binding path: " + path);
    p.is_agent = true;
    p.agent_index = static_cast<std::size_t>(
        std::strtoul(path.c_str() + 7, nullptr, 10));
    p.field = path.substr(close + 2);
  } else if (path.rfind("ego.", 0) == 0) {
    p.field = path;  // handled by name below
  } else {
    p.field = path;
  }
  return p;
}

void apply_discrete(ScenarioConfig& cfg, const std::string& path,
                    std::size_t level) {
  Path p = parse_path(path);
  if (!p.is_agent) {
    if (p.field == "fog") {
      cfg.fog = level != 0;
      return;
    }
    throw SimError("unsupported discrete binding path: " + path);
  }
  if (p.agent_index >= cfg.agents.size())
    throw SimError("binding path agent index out of range: " + path);
  AgentConfig& a = cfg.agents[p.agent_index];
  if (p.field == "color")
    a.color = static_cast<Color>(level);
  else if (p.field == "color2")
    a.color2 = static_cast<Color>(level);
  else if (p.field == "model")
    a.model = static_cast<int>(level);
  else
    throw SimError("unsupported discrete binding path: " + path);
}

void apply_continuous(ScenarioConfig& cfg, const std::string& path,
                      double value) {
  Path p = parse_path(path);
  if (!p.is_agent) {
    if (p.field == "ego.init_longitudinal_position") {
      cfg.ego.init_longitudinal_position = value;
      return;
    }
    if (p.field == "ego.init_speed") {
      cfg.ego.init_speed = value;
      return;
    }
    throw SimError("unsupported continuous binding path: " + path);
  }
  if (p.agent_index >= cfg.agents.size())
    throw SimError("binding path agent index out of range: " + path);
  AgentConfig& a = cfg.agents[p.agent_index];
  if (p.field == "longitudinal_position")
    a.longitudinal_position = value;
  else if (p.field == "lateral_offset")
    a.lateral_offset = value;
  else if (p.field == "speed")
    a.speed = value;
  else
    throw SimError("unsupported continuous binding path: " + path);
}

}  // namespace

ScenarioConfig ScenarioTemplate::instantiate(const ParamValuation& v) const {
  auto errs = validate_valuation(space, v);
  if (!errs.empty()) throw SimError("invalid valuation: " + errs[0]);
  ScenarioConfig cfg = base;
  for (const auto& d : space.discrete) {
    auto it = bindings.find(d.name);
    if (it == bindings.end()) throw SimError("no binding for " + d.name);
    apply_discrete(cfg, it->second, v.discrete_choice.at(d.name));
  }
  for (const auto& c : space.continuous) {
    auto it = bindings.find(c.name);
    if (it == bindings.end()) throw SimError("no binding for " + c.name);
    apply_continuous(cfg, it->second, v.continuous_value.at(c.name));
  }
  return cfg;
}

std::string ScenarioTemplate::to_json_string() const {
  nlohmann::json j;
  j["base"] = nlohmann::json::parse(base.to_json_string());
  j["space"] = nlohmann::json::parse(space.to_json_string());
  j["bindings"] = bindings;
  return j.dump(2);
}

ScenarioTemplate ScenarioTemplate::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ScenarioTemplate t;
  t.base = ScenarioConfig::from_json_string(j.at("base").dump());
  t.space = ParameterSpace::from_json_string(j.at("space").dump());
  t.bindings =
      j.at("bindings").get<std::map<std::string, std::string>>();
  return t;
}

ScenarioTemplate urban_road_scenario() {
  ScenarioTemplate t;

  RoadConfig& road = t.base.road;
  road.lane_count = 3;
  road.lane_width = 3.5;
  road.crosswalk_position = 80;
  road.length = 200;

  t.base.ego.lane = 1;  // center lane, y = 0
  t.base.ego.init_speed = 10;
  t.base.ego.init_longitudinal_position = 5;

  double right = lane_center_y(road, 0);
  double left = lane_center_y(road, 2);
  double sidewalk_r = right - road.lane_width / 2 - 0.75;
  double sidewalk_l = left + road.lane_width / 2 + 0.75;

  auto vehicle = [](AgentKind kind, double x, double y, double speed = 0) {
    AgentConfig a;
    a.kind = kind;
    a.longitudinal_position = x;
    a.lateral_offset = y;
    a.speed = speed;
    return a;
  };
  auto pedestrian = [](AgentKind kind, double x, double y, double speed) {
    AgentConfig a;
    a.kind = kind;
    a.longitudinal_position = x;
    a.lateral_offset = y;
    a.speed = speed;
    return a;
  };

  // agents[0..5]: Vehicles 1..6; agents[6..7]: crosswalk pedestrians;
  // agents[8]: jaywalker
  t.base.agents = {
      vehicle(AgentKind::ParkedVehicle, 30, right),      // Vehicle 1 (position free)
      vehicle(AgentKind::StoppingVehicle, 72, 0.0),      // Vehicle 2, stopped queue
      vehicle(AgentKind::ParkedVehicle, 25, left),       // Vehicle 3
      vehicle(AgentKind::ParkedVehicle, 45, right),      // Vehicle 4
      vehicle(AgentKind::ParkedVehicle, 60, right),      // Vehicle 5
      vehicle(AgentKind::ParkedVehicle, 55, left),       // Vehicle 6 (fixed)
      pedestrian(AgentKind::CrosswalkPedestrian, 80, sidewalk_r, 1.2),
      pedestrian(AgentKind::CrosswalkPedestrian, 80, sidewalk_l, 1.0),
      pedestrian(AgentKind::JaywalkingPedestrian, 52, sidewalk_r, 1.5),
  };
  t.base.agents[5].color = Color::Black;

  std::vector<std::string> colors = {"red", "green", "blue", "white", "black"};
  std::vector<std::string> models = {"m0", "m1", "m2", "m3", "m4"};

  for (int i = 1; i <= 5; ++i) {
    std::string name = "vehicle" + std::to_string(i) + "_color";
    t.space.discrete.push_back({name, colors});
    t.bindings[name] = "agents[" + std::to_string(i - 1) + "].color";
  }
  for (int i = 1; i <= 5; ++i) {
    std::string name = "vehicle" + std::to_string(i) + "_model";
    t.space.discrete.push_back({name, models});
    t.bindings[name] = "agents[" + std::to_string(i - 1) + "].model";
  }
  t.space.discrete.push_back({"pedestrian_shirt_color", colors});
  t.bindings["pedestrian_shirt_color"] = "agents[8].color";
  t.space.discrete.push_back({"pedestrian_pants_color", colors});
  t.bindings["pedestrian_pants_color"] = "agents[8].color2";
  t.space.discrete.push_back({"fog", {"false", "true"}});
  t.bindings["fog"] = "fog";

  t.space.continuous.push_back({"ego_init_position", 0.0, 10.0});
  t.bindings["ego_init_position"] = "ego.init_longitudinal_position";
  t.space.continuous.push_back({"vehicle1_position", 20.0, 40.0});
  t.bindings["vehicle1_position"] = "agents[0].longitudinal_position";
  t.space.continuous.push_back({"pedestrian_speed", 0.5, 3.0});
  t.bindings["pedestrian_speed"] = "agents[8].speed";

  return t;
}

}  // namespace falsitav
