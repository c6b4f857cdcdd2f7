#include <gtest/gtest.h>

#include <filesystem>

#include "momsafe/config_io.hpp"
#include "momsafe/units.hpp"

namespace momsafe {
namespace {

const std::filesystem::path kData = MOMSAFE_TEST_DATA_DIR;

void expect_same(const SimConfig& a, const SimConfig& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.duration, b.duration);
  EXPECT_EQ(a.network.topology, b.network.topology);
  for (EdgeRole e : {EdgeRole::approach, EdgeRole::main, EdgeRole::alt}) {
    EXPECT_EQ(a.network.edge(e).lanes, b.network.edge(e).lanes);
    EXPECT_NEAR(a.network.edge(e).v_limit, b.network.edge(e).v_limit, 1e-9);
    EXPECT_NEAR(a.network.edge(e).v_min, b.network.edge(e).v_min, 1e-9);
    EXPECT_DOUBLE_EQ(a.network.edge(e).length, b.network.edge(e).length);
  }
  ASSERT_EQ(a.arrivals.types.size(), b.arrivals.types.size());
  for (std::size_t i = 0; i < a.arrivals.types.size(); ++i) {
    EXPECT_EQ(a.arrivals.types[i].name, b.arrivals.types[i].name);
    EXPECT_DOUBLE_EQ(a.arrivals.types[i].mass, b.arrivals.types[i].mass);
    EXPECT_NEAR(a.arrivals.types[i].v_max_self, b.arrivals.types[i].v_max_self, 1e-9);
    EXPECT_DOUBLE_EQ(a.arrivals.types[i].rate_per_min, b.arrivals.types[i].rate_per_min);
    EXPECT_DOUBLE_EQ(a.arrivals.types[i].slow_probability, b.arrivals.types[i].slow_probability);
  }
  ASSERT_EQ(a.initial.size(), b.initial.size());
  for (std::size_t i = 0; i < a.initial.size(); ++i) {
    EXPECT_EQ(a.initial[i].v_max_self.has_value(), b.initial[i].v_max_self.has_value());
    EXPECT_NEAR(a.initial[i].speed, b.initial[i].speed, 1e-9);
  }
  EXPECT_EQ(a.access.mode, b.access.mode);
  ASSERT_EQ(a.access.classes.size(), b.access.classes.size());
  for (std::size_t i = 0; i < a.access.classes.size(); ++i) {
    EXPECT_EQ(a.access.classes[i].rho_upper, b.access.classes[i].rho_upper);
    EXPECT_EQ(a.access.classes[i].rho_lower, b.access.classes[i].rho_lower);
    EXPECT_EQ(a.access.classes[i].gate_params.pi_0, b.access.classes[i].gate_params.pi_0);
  }
  EXPECT_EQ(a.speed.enabled, b.speed.enabled);
  EXPECT_NEAR(a.speed.bounds.dv_cap_self, b.speed.bounds.dv_cap_self, 1e-9);
}

TEST(ConfigIo, BuiltinSuitesRoundTrip) {
  for (const auto& name : builtin_suite_names()) {
    const auto suite = builtin_suite(name);
    const auto back = parse_suite(suite_to_json(suite));
    EXPECT_EQ(back.name, suite.name);
    EXPECT_EQ(back.runs, suite.runs);
    EXPECT_EQ(back.steady_from, suite.steady_from);
    ASSERT_EQ(back.scenarios.size(), suite.scenarios.size());
    for (std::size_t i = 0; i < suite.scenarios.size(); ++i) {
      EXPECT_EQ(back.scenarios[i].label, suite.scenarios[i].label);
      EXPECT_EQ(back.scenarios[i].quota_from, suite.scenarios[i].quota_from);
      expect_same(back.scenarios[i].config, suite.scenarios[i].config);
    }
    // Serialising twice is stable.
    EXPECT_EQ(suite_to_json(back), suite_to_json(suite));
  }
}

TEST(ConfigIo, PlainConfigBecomesOneScenarioSuite) {
  const auto suite = load_suite(kData / "small_gate.json");
  EXPECT_EQ(suite.name, "small_gate");
  ASSERT_EQ(suite.scenarios.size(), 1u);
  const auto& c = suite.scenarios[0].config;
  EXPECT_EQ(c.arrivals.p_app, 0.4);
  EXPECT_NEAR(c.network.approach.v_limit, kmh_to_ms(50.0), 1e-12);
  EXPECT_EQ(c.access.classes.size(), 3u);
  EXPECT_TRUE(std::isinf(c.access.classes[2].rho_upper));
  EXPECT_EQ(suite.duration, 300);
}

TEST(ConfigIo, SimConfigRoundTrip) {
  const auto c = builtin_suite("overtake_ABC").scenarios[7].config;
  expect_same(parse_sim_config(sim_config_to_json(c)), c);
}

TEST(ConfigIo, RejectsUnknownKeysWithPath) {
  try {
    parse_sim_config(R"({"network": {"main": {"lenght_m": 5}}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lenght_m"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("network.main"), std::string::npos);
  }
}

TEST(ConfigIo, RejectsInvalidValues) {
  EXPECT_THROW(load_suite(kData / "bad_lanes.json"), ConfigError);
  EXPECT_THROW(parse_sim_config("not json"), ConfigError);
  EXPECT_THROW(parse_sim_config(R"({"duration": "long"})"), ConfigError);
  EXPECT_THROW(parse_sim_config(R"({"access": {"mode": "maybe"}})"), ConfigError);
  EXPECT_THROW(parse_sim_config(R"({"arrivals": {"types": [{"name": "x", "mass_kg": -1, "v_max_kmh": 50}]}})"),
               ConfigError);
  EXPECT_THROW(parse_suite(R"({"name": "s", "scenarios": []})"), ConfigError);
}

TEST(ConfigIo, ResolveSuiteByNameOrPath) {
  EXPECT_EQ(resolve_suite("access_ABC").name, "access_ABC");
  EXPECT_EQ(resolve_suite((kData / "small_gate.json").string()).name, "small_gate");
  EXPECT_THROW(resolve_suite("no_such_suite"), ConfigError);
}

}  // namespace
}  // namespace momsafe
