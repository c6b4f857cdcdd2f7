#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "momsafe/microsim.hpp"

namespace momsafe {

/// One scenario of a suite. With `quota_from` set, the gate runs in quota
/// mode and each run copies its pool and quota from the named scenario's
/// run with the same index (gate crossings and admissions respectively).
struct ScenarioSpec {
  std::string label;
  SimConfig config;
  std::optional<std::string> quota_from;
};

/// A set of scenarios run over the same seeds. Run r of every scenario uses
/// the master seed and run index r, so arrival streams are paired.
struct ScenarioSuite {
  std::string name;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  long duration = 1000;
  long steady_from = 0;  // first step of the steady-state window
  std::vector<ScenarioSpec> scenarios;

  void validate() const;
  const ScenarioSpec& scenario(std::string_view label) const;
  /// The scenario's SimConfig for run `run`, before any quota is filled in.
  SimConfig run_config(const ScenarioSpec& s, std::size_t run) const;
};

// Vehicle types with the simulator's default geometry and acceleration limits.
VehicleType motorcycle_type(double mass, double v_max_kmh);
VehicleType passenger_type(double mass, double v_max_kmh);
VehicleType hgv_type(double mass, double v_max_kmh);

/// Gate study: per-class arrival rates 1, 6 and 11 veh/min (A, B, C), r = 9.
ScenarioSuite access_suite();

/// Speed advisory on a single highway: a fast motorcycle, passenger vehicle
/// or HGV meets a 60 km/h HGV (A), a 60 km/h motorcycle (B) or a stranded
/// passenger vehicle on a road with a 60 km/h minimum (C).
ScenarioSuite overtake_suite();

/// Speed control and access control toggled over A (neither), B (speed),
/// C (access) and D (both).
ScenarioSuite combined_suite();

/// C and D of the combined suite plus E and F, which are A and B with
/// arrivals thinned uniformly at random to C's and D's admitted counts.
ScenarioSuite volume_suite();

std::vector<std::string> builtin_suite_names();

/// Throws ConfigError for unknown names.
ScenarioSuite builtin_suite(std::string_view name);

}  // namespace momsafe
