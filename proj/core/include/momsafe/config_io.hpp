#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "momsafe/microsim.hpp"
#include "momsafe/scenarios.hpp"

namespace momsafe {

// JSON configuration files. Speeds are in km/h, lengths in metres, masses in
// kg; everything is converted to SI on load. Unknown keys are rejected so a
// typo cannot silently fall back to a default. All parse errors surface as
// ConfigError with the offending key path.

SimConfig parse_sim_config(std::string_view json_text);
std::string sim_config_to_json(const SimConfig& config);

/// A suite document has a "scenarios" array; a plain SimConfig document is
/// accepted too and becomes a one-scenario suite.
ScenarioSuite parse_suite(std::string_view json_text);
std::string suite_to_json(const ScenarioSuite& suite);

ScenarioSuite load_suite(const std::filesystem::path& path);

/// Built-in suite name or path to a JSON file.
ScenarioSuite resolve_suite(std::string_view name_or_path);

}  // namespace momsafe
