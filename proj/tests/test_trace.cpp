#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "falsitav/sim.hpp"
#include "falsitav/trace.hpp"
#include "falsitav/util.hpp"

using namespace falsitav;

static Trace make_xyz() {
  Trace t({"x"});
  t.push_back(0.0, {1});
  t.push_back(1.0, {2});
  t.push_back(2.0, {3});
  return t;
}

TEST_CASE("signal_at direct lookup and errors") {
  Trace t = make_xyz();
  CHECK(t.signal_at("x", 1) == 2);
  CHECK_THROWS_AS(t.signal_at("y", 0), TraceError);
  CHECK_THROWS_AS(t.signal_at("x", 3), TraceError);
}

TEST_CASE("validate_trace flags ordering and non-finite values") {
  Trace ok({"x"});
  ok.push_back(0.0, {1});
  ok.push_back(0.1, {1});
  ok.push_back(0.2, {1});
  CHECK(validate_trace(ok).empty());

  Trace bad({"x"});
  bad.push_back(0.0, {1});
  bad.push_back(0.1, {1});
  bad.push_back(0.1, {1});
  auto errs = validate_trace(bad);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("2") != std::string::npos);

  Trace nan_trace({"x"});
  nan_trace.push_back(0.0, {std::nan("")});
  errs = validate_trace(nan_trace);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("x") != std::string::npos);
  CHECK(errs[0].find("0") != std::string::npos);

  Trace empty({"x"});
  CHECK(!validate_trace(empty).empty());
}

TEST_CASE("CSV round trip is bit exact") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-1e6, 1e6);
  Trace t({"a", "b", "c"});
  double time = 0;
  for (int i = 0; i < 200; ++i) {
    time += std::uniform_real_distribution<double>(1e-4, 1.0)(rng);
    t.push_back(time, {val(rng), val(rng) * 1e-9, val(rng) * 1e9});
  }
  std::ostringstream os;
  t.to_csv(os);
  std::istringstream is(os.str());
  Trace back = Trace::from_csv(is);
  REQUIRE(back.size() == t.size());
  REQUIRE(back.signal_names() == t.signal_names());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.time(i) == t.time(i));
    for (std::size_t s = 0; s < 3; ++s) CHECK(back.value(s, i) == t.value(s, i));
  }
  // header format
  CHECK(os.str().rfind("time,a,b,c\n", 0) == 0);
}

TEST_CASE("ParameterSpace JSON round trip and validation") {
  ParameterSpace space;
  space.discrete.push_back({"color", {"red", "green"}});
  space.continuous.push_back({"w", 0.0, 1.0});
  auto back = ParameterSpace::from_json_string(space.to_json_string());
  REQUIRE(back.discrete.size() == 1);
  CHECK(back.discrete[0].levels == std::vector<std::string>{"red", "green"});
  REQUIRE(back.continuous.size() == 1);
  CHECK(back.continuous[0].lower == 0.0);
  CHECK(back.continuous[0].upper == 1.0);
  CHECK(space.validate().empty());
  CHECK(space.discrete_sizes() == std::vector<int>{2});

  ParameterSpace bad = space;
  bad.continuous[0].upper = -1;
  CHECK(!bad.validate().empty());
  ParameterSpace dup = space;
  dup.continuous.push_back({"color", 0, 1});
  CHECK(!dup.validate().empty());
}

TEST_CASE("validate_valuation bounds") {
  ParameterSpace space;
  space.discrete.push_back({"color", {"red", "green"}});
  space.continuous.push_back({"w", 0.0, 1.0});
  ParamValuation v;
  v.discrete_choice["color"] = 1;
  v.continuous_value["w"] = 0.5;
  CHECK(validate_valuation(space, v).empty());
  v.discrete_choice["color"] = 2;
  CHECK(!validate_valuation(space, v).empty());
  v.discrete_choice["color"] = 0;
  v.continuous_value["w"] = 1.5;
  CHECK(!validate_valuation(space, v).empty());
  ParamValuation missing;
  CHECK(!validate_valuation(space, missing).empty());
}

TEST_CASE("simulator traces satisfy the trace invariants") {
  ScenarioConfig cfg;
  cfg.ego.init_speed = 5;
  AgentConfig a;
  a.kind = AgentKind::ParkedVehicle;
  a.longitudinal_position = 40;
  a.lateral_offset = -3.5;
  cfg.agents.push_back(a);
  PerceptionParams pp;
  pp.base_miss_rate = 0.3;
  pp.position_noise_std = 0.2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimOutcome out = simulate(cfg, pp, 0.05, 5.0, seed);
    CHECK(validate_trace(out.trace).empty());
  }
}
