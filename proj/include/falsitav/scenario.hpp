#pragma once

#include <map>
#include <string>

#include "falsitav/sim.hpp"
#include "falsitav/trace.hpp"

namespace falsitav {

// A base scenario plus a parameter space and bindings mapping each
// parameter onto a config field, e.g. "agents[0].color" or
// "ego.init_longitudinal_position". Discrete parameters bind by level
// index; "fog" binds 0/1 to false/true.
struct ScenarioTemplate {
  ScenarioConfig base;
  ParameterSpace space;
  std::map<std::string, std::string> bindings;  // parameter name -> path

  ScenarioConfig instantiate(const ParamValuation& v) const;

  std::string to_json_string() const;
  static ScenarioTemplate from_json_string(const std::string& text);
};

// The built-in one-way-road scenario: six agent vehicles (five of them with
// free color/model), two crosswalk pedestrians, and a jaywalker crossing
// between the parked cars; 13 discrete and 3 continuous free parameters.
ScenarioTemplate urban_road_scenario();

}  // namespace falsitav
