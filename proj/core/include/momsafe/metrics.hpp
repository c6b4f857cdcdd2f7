#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "momsafe/domain.hpp"
#include "momsafe/risk_model.hpp"
#include "momsafe/speed_advisory.hpp"

namespace momsafe {

inline constexpr std::size_t kMaxClasses = 8;

/// Access-loop signals and gate counts of one step.
struct StepRecord {
  long step = 0;
  int admitted = 0;  // y[k]
  double yhat = 0.0; // veh/min
  double error = 0.0;
  double pi = 0.0;
  std::array<int, kMaxClasses> requests{};  // per momentum class
  std::array<int, kMaxClasses> admits{};
  long spawned = 0;
  long queued = 0;
  long on_network = 0;
  long exited = 0;
};

/// Per-vehicle outcome. Risk and travel time refer to the restricted edge
/// ("main"), between entering it (t_alpha) and leaving it (t_omega).
struct VehicleRecord {
  VehicleId id{};
  std::string type;
  std::size_t class_index = 0;
  double mass = 0.0;
  double v_max_self = 0.0;
  long spawned_at = 0;
  bool requested = false;  // crossed the gate sensor
  bool admitted = false;
  std::optional<long> entered_main;
  std::optional<long> exited_main;
  RiskExceedance risk{};
  double max_dv_self = 0.0;
  double max_dv_other = 0.0;
  long exceed_steps = 0;

  bool completed() const noexcept { return entered_main.has_value() && exited_main.has_value(); }
  long travel_time() const noexcept { return completed() ? *exited_main - *entered_main : 0; }
};

struct TraceSample {
  long step = 0;
  VehicleId id{};
  int lane = 0;
  double position = 0.0;
  double speed = 0.0;
  double v_star = 0.0;
  Binding binding{};
  DeltaVSample dv{};
};

struct RunMetrics {
  std::string scenario;
  std::uint64_t run = 0;
  std::vector<StepRecord> series;
  std::vector<VehicleRecord> vehicles;
  std::vector<TraceSample> traces;
  long gate_crossings = 0;
  long gate_admitted = 0;
};

}  // namespace momsafe
