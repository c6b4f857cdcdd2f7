#include "momsafe/scenarios.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "momsafe/units.hpp"

namespace momsafe {

namespace {

VehicleType make_type(std::string name, double mass, double v_max_kmh, double length, double accel,
                      double decel) {
  VehicleType t;
  t.name = std::move(name);
  t.mass = mass;
  t.v_max_self = kmh_to_ms(v_max_kmh);
  t.length = length;
  t.accel_max = accel;
  t.decel_max = decel;
  return t;
}

RoadEdge make_edge(std::string id, double length, int lanes, double v_limit_kmh, double v_min_kmh = 0.0) {
  return RoadEdge{std::move(id), length, lanes, kmh_to_ms(v_limit_kmh), kmh_to_ms(v_min_kmh)};
}

SimConfig access_base(double rate_per_min) {
  SimConfig c;
  c.network.topology = Topology::gate_fork;
  c.network.approach = make_edge("approach", 250.0, 2, 50.0);
  c.network.main = make_edge("main", 500.0, 2, 100.0);
  c.network.alt = make_edge("alt", 500.0, 2, 100.0);
  c.network.sensor_offset = 30.0;
  c.arrivals.types = {motorcycle_type(200.0, 144.0), passenger_type(2000.0, 144.0), hgv_type(20000.0, 72.0)};
  for (auto& t : c.arrivals.types) t.rate_per_min = rate_per_min;
  c.access.mode = GateMode::logistic;
  c.access.reference_flow = 9.0;
  c.access.filter_window = 20;
  c.access.gains = {0.9, 0.99, 1.0};
  c.access.classes = three_class_partition({0.05, 0.9, 1.0, -3.0}, {0.05, 0.9, 1.0, 0.0}, {0.05, 0.9, 1.0, 3.0});
  return c;
}

SimConfig combined_base(bool speed, bool access) {
  SimConfig c;
  c.network.topology = Topology::gate_fork;
  c.network.approach = make_edge("approach", 250.0, 3, 100.0);
  c.network.main = make_edge("main", 800.0, 3, 130.0);
  c.network.alt = make_edge("alt", 800.0, 3, 130.0);
  c.network.sensor_offset = 30.0;

  auto hgv = hgv_type(20000.0, 72.0);
  hgv.slow_probability = 0.3;
  hgv.slow_v_max = kmh_to_ms(60.0);
  c.arrivals.types = {motorcycle_type(200.0, 144.0), passenger_type(2500.0, 144.0), hgv};
  for (auto& t : c.arrivals.types) t.rate_per_min = 8.0;

  c.access.mode = access ? GateMode::logistic : GateMode::off;
  c.access.reference_flow = 12.0;
  c.access.classes =
      three_class_partition({0.90, 0.09, 1.0, -3.0}, {0.3, 0.69, 1.0, 0.0}, {0.01, 0.98, 1.0, 3.0});
  c.speed.enabled = speed;
  return c;
}

SimConfig overtake_config(const VehicleType& fast, const VehicleType& slow, double slow_kmh, double road_min_kmh) {
  SimConfig c;
  c.network.topology = Topology::highway;
  c.network.main = make_edge("highway", 10000.0, 2, 130.0, road_min_kmh);
  c.arrivals.types = {fast, slow};
  c.initial = {
      InitialVehicle{fast.name, 1, 50.0, kmh_to_ms(130.0), std::nullopt},
      InitialVehicle{slow.name, 0, 650.0, kmh_to_ms(slow_kmh), kmh_to_ms(slow_kmh)},
  };
  c.speed.enabled = true;
  c.record_traces = true;
  return c;
}

}  // namespace

VehicleType motorcycle_type(double mass, double v_max_kmh) {
  return make_type("motorcycle", mass, v_max_kmh, 2.2, 4.0, 6.0);
}

VehicleType passenger_type(double mass, double v_max_kmh) {
  return make_type("pv", mass, v_max_kmh, 4.5, 2.6, 4.5);
}

VehicleType hgv_type(double mass, double v_max_kmh) {
  return make_type("hgv", mass, v_max_kmh, 12.0, 1.0, 3.5);
}

void ScenarioSuite::validate() const {
  if (name.empty()) throw ConfigError("suite needs a name");
  if (runs == 0) throw ConfigError(fmt::format("suite '{}': runs must be >= 1", name));
  if (duration < 0) throw ConfigError(fmt::format("suite '{}': duration must be >= 0", name));
  if (steady_from < 0) throw ConfigError(fmt::format("suite '{}': steady_from must be >= 0", name));
  if (scenarios.empty()) throw ConfigError(fmt::format("suite '{}' has no scenarios", name));
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    if (s.label.empty()) throw ConfigError(fmt::format("suite '{}': scenario {} needs a label", name, i));
    for (std::size_t j = 0; j < i; ++j) {
      if (scenarios[j].label == s.label) {
        throw ConfigError(fmt::format("suite '{}': duplicate scenario '{}'", name, s.label));
      }
    }
    try {
      run_config(s, 0).validate();
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("scenario '{}': {}", s.label, e.what()));
    }
    if (!s.quota_from) continue;
    if (s.config.access.mode != GateMode::quota) {
      throw ConfigError(fmt::format("scenario '{}': quota_from needs gate mode 'quota'", s.label));
    }
    const auto src = std::find_if(scenarios.begin(), scenarios.begin() + static_cast<std::ptrdiff_t>(i),
                                  [&](const ScenarioSpec& o) { return o.label == *s.quota_from; });
    if (src == scenarios.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ConfigError(
          fmt::format("scenario '{}': quota_from '{}' must name an earlier scenario", s.label, *s.quota_from));
    }
    if (src->quota_from) {
      throw ConfigError(fmt::format("scenario '{}': quota source '{}' is itself thinned", s.label, src->label));
    }
  }
}

const ScenarioSpec& ScenarioSuite::scenario(std::string_view label) const {
  for (const auto& s : scenarios) {
    if (s.label == label) return s;
  }
  throw ConfigError(fmt::format("suite '{}' has no scenario '{}'", name, label));
}

SimConfig ScenarioSuite::run_config(const ScenarioSpec& s, std::size_t run) const {
  SimConfig c = s.config;
  c.name = s.label;
  c.seed = seed;
  c.run_index = run;
  c.duration = duration;
  return c;
}

ScenarioSuite access_suite() {
  ScenarioSuite suite;
  suite.name = "access_ABC";
  suite.seed = 20240601;
  suite.runs = 100;
  suite.duration = 1000;
  suite.steady_from = 500;
  for (auto [label, rate] : {std::pair{"A", 1.0}, std::pair{"B", 6.0}, std::pair{"C", 11.0}}) {
    suite.scenarios.push_back({label, access_base(rate), std::nullopt});
  }
  return suite;
}

ScenarioSuite overtake_suite() {
  ScenarioSuite suite;
  suite.name = "overtake_ABC";
  suite.seed = 1;
  suite.runs = 1;
  suite.duration = 200;
  const std::vector<VehicleType> fast = {motorcycle_type(300.0, 144.0), passenger_type(2500.0, 144.0),
                                         hgv_type(20000.0, 144.0)};
  struct Leading {
    const char* label;
    VehicleType type;
    double speed_kmh;
    double road_min_kmh;
  };
  auto slow_moto = motorcycle_type(300.0, 144.0);
  slow_moto.name = "slow_motorcycle";
  auto slow_hgv = hgv_type(20000.0, 72.0);
  slow_hgv.name = "slow_hgv";
  auto stranded = passenger_type(2500.0, 144.0);
  stranded.name = "stranded_pv";
  const std::vector<Leading> leading = {
      {"A", slow_hgv, 60.0, 0.0},
      {"B", slow_moto, 60.0, 0.0},
      {"C", stranded, 0.0, 60.0},
  };
  for (const auto& l : leading) {
    for (const auto& f : fast) {
      suite.scenarios.push_back(
          {fmt::format("{}_{}", l.label, f.name), overtake_config(f, l.type, l.speed_kmh, l.road_min_kmh),
           std::nullopt});
    }
  }
  return suite;
}

ScenarioSuite combined_suite() {
  ScenarioSuite suite;
  suite.name = "combined_ABCD";
  suite.seed = 20240815;
  suite.runs = 100;
  suite.duration = 3600;
  suite.steady_from = 300;
  suite.scenarios = {
      {"A", combined_base(false, false), std::nullopt},
      {"B", combined_base(true, false), std::nullopt},
      {"C", combined_base(false, true), std::nullopt},
      {"D", combined_base(true, true), std::nullopt},
  };
  return suite;
}

ScenarioSuite volume_suite() {
  ScenarioSuite suite = combined_suite();
  suite.name = "volume_CDEF";
  auto thinned = [](bool speed) {
    SimConfig c = combined_base(speed, false);
    c.access.mode = GateMode::quota;
    return c;
  };
  suite.scenarios = {
      {"C", combined_base(false, true), std::nullopt},
      {"D", combined_base(true, true), std::nullopt},
      {"E", thinned(false), std::string("C")},
      {"F", thinned(true), std::string("D")},
  };
  return suite;
}

std::vector<std::string> builtin_suite_names() {
  return {"access_ABC", "overtake_ABC", "combined_ABCD", "volume_CDEF"};
}

ScenarioSuite builtin_suite(std::string_view name) {
  if (name == "access_ABC") return access_suite();
  if (name == "overtake_ABC") return overtake_suite();
  if (name == "combined_ABCD") return combined_suite();
  if (name == "volume_CDEF") return volume_suite();
  throw ConfigError(fmt::format("unknown suite '{}'", name));
}

}  // namespace momsafe
