#include "momsafe/speed_advisory.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace momsafe {

LeaderSet build_leader_set(const RoadOccupant& follower, std::span<const RoadOccupant> others, double horizon) {
  LeaderSet set{follower.id, {}};
  for (const auto& o : others) {
    if (o.id == follower.id) continue;
    const double gap = o.position - follower.position;
    if (gap > 0.0 && gap <= horizon && o.speed < follower.speed) {
      set.leaders.push_back({o.id, o.mass, o.speed, gap});
    }
  }
  return set;
}

double closing_speed_cap(double m_i, double m_j, const AdvisoryBounds& bounds) noexcept {
  const double total = m_i + m_j;
  return std::min(total / m_j * bounds.dv_cap_self, total / m_i * bounds.dv_cap_other);
}

std::string_view to_string(BindingKind b) noexcept {
  switch (b) {
    case BindingKind::none: return "none";
    case BindingKind::road_max: return "road_max";
    case BindingKind::self_max: return "self_max";
    case BindingKind::dv_self: return "dv_self";
    case BindingKind::dv_other: return "dv_other";
    case BindingKind::road_min: return "road_min";
  }
  return "?";
}

std::string binding_label(const Binding& b) {
  if (b.kind == BindingKind::dv_self || b.kind == BindingKind::dv_other) {
    return fmt::format("{}({})", to_string(b.kind), b.leader.value);
  }
  return std::string(to_string(b.kind));
}

SpeedReference speed_reference(const VehicleState& follower, const LeaderSet& leaders, const RoadEdge& edge,
                               const AdvisoryBounds& bounds) {
  SpeedReference ref{follower.spec.id, 0.0, {}};
  const double m_i = follower.spec.mass;

  double v = std::min(edge.v_limit, follower.spec.v_max_self);
  ref.binding.kind = edge.v_limit <= follower.spec.v_max_self ? BindingKind::road_max : BindingKind::self_max;

  for (const auto& l : leaders.leaders) {
    const double total = m_i + l.mass;
    const double via_self = total / l.mass * bounds.dv_cap_self;
    const double via_other = total / m_i * bounds.dv_cap_other;
    const double cap = l.speed + std::min(via_self, via_other);
    if (cap < v) {
      v = cap;
      ref.binding = {via_self <= via_other ? BindingKind::dv_self : BindingKind::dv_other, l.id};
    }
  }

  const double v_upper = std::min(edge.v_limit, follower.spec.v_max_self);
  if (v < edge.v_min && edge.v_min <= v_upper) {
    v = edge.v_min;
    ref.binding = {BindingKind::road_min, {}};
  }
  ref.v_star = v;
  return ref;
}

DeltaVSample dv_snapshot(double follower_mass, double follower_speed, const LeaderSet& leaders) noexcept {
  DeltaVSample worst;
  for (const auto& l : leaders.leaders) {
    const auto c = inelastic_collision(follower_mass, follower_speed, l.mass, l.speed);
    worst.self = std::max(worst.self, c.delta_v_striker);
    worst.other = std::max(worst.other, c.delta_v_struck);
  }
  return worst;
}

}  // namespace momsafe
