#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "momsafe/domain.hpp"
#include "momsafe/risk_model.hpp"

namespace momsafe {

inline constexpr double kDefaultSensingHorizon = 300.0;  // m

/// A slower vehicle ahead of the follower on the same road, within the
/// sensing horizon. `gap` is the front-to-front distance.
struct Leader {
  VehicleId id{};
  double mass = 0.0;   // kg
  double speed = 0.0;  // m/s
  double gap = 0.0;    // m, > 0
};

struct LeaderSet {
  VehicleId follower{};
  std::vector<Leader> leaders;
};

/// Candidate vehicle for LeaderSet membership.
struct RoadOccupant {
  VehicleId id{};
  double mass = 0.0;
  double position = 0.0;  // m, front bumper
  double speed = 0.0;     // m/s
};

/// Members are strictly ahead (0 < gap <= horizon) and strictly slower than
/// the follower. Lane is ignored.
LeaderSet build_leader_set(const RoadOccupant& follower, std::span<const RoadOccupant> others,
                           double horizon = kDefaultSensingHorizon);

/// Largest closing speed (m/s) at which neither delta-v cap is exceeded:
///   min((m_i + m_j) / m_j * cap_self, (m_i + m_j) / m_i * cap_other).
double closing_speed_cap(double m_i, double m_j, const AdvisoryBounds& bounds) noexcept;

enum class BindingKind { none, road_max, self_max, dv_self, dv_other, road_min };

std::string_view to_string(BindingKind b) noexcept;

struct Binding {
  BindingKind kind = BindingKind::none;
  VehicleId leader{};  // set for dv_self / dv_other
  friend bool operator==(const Binding&, const Binding&) = default;
};

std::string binding_label(const Binding& b);

struct SpeedReference {
  VehicleId vehicle{};
  double v_star = 0.0;  // m/s
  Binding binding{};
};

/// v* = max(v_min, min(v_upper, min_j (v_j + r_ij))), with
/// v_upper = min(edge.v_limit, v_max_self). A road minimum above the
/// vehicle's own top speed is not enforced.
SpeedReference speed_reference(const VehicleState& follower, const LeaderSet& leaders, const RoadEdge& edge,
                               const AdvisoryBounds& bounds);

/// Worst predicted (delta-v self, delta-v other) over the leader set at the
/// follower's current speed; zeros when the set is empty.
DeltaVSample dv_snapshot(double follower_mass, double follower_speed, const LeaderSet& leaders) noexcept;

}  // namespace momsafe
