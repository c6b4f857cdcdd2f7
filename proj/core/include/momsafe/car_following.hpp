#pragma once

#include <optional>

#include "momsafe/domain.hpp"

namespace momsafe {

// Discrete-time Krauss-style safe speed (one-second steps, Euler position
// update). A follower at speed v behind a leader at speed u with
// bumper-to-bumper gap g may take next speed v' only if, should both brake
// from now on (the follower at its own limit, the leader at
// b* = max(b_leader, b_follower)), the final gap stays >= min_gap:
//
//   D_f(v') <= g + S*(u) - min_gap
//
// with D(v) = sum_{n>=0} max(0, v - n b) the distance covered while braking
// from v including the current step, and S(u) = D(u) - u. Taking b* at least
// as large as the follower's own limit makes the worst-case gap sequence
// unimodal, so the end gap bounds every intermediate gap. If the condition
// holds for max(0, v - b_f) at every step, no two vehicles in a lane overlap.

inline constexpr double kDefaultMinGap = 2.5;  // m

/// Distance covered braking at `decel` from speed v, including this step.
double braking_distance(double v, double decel) noexcept;

/// Largest v with braking_distance(v, decel) <= budget; 0 for budget <= 0.
double max_speed_for_distance(double budget, double decel) noexcept;

/// Largest admissible next speed behind a leader.
double safe_speed(double gap, double leader_speed, double leader_decel, double follower_decel,
                  double min_gap = kDefaultMinGap) noexcept;

/// True when a follower at `follower_speed` can stay collision-free behind
/// the leader with no more than half of its braking capability this step.
bool gap_acceptable(double gap, double follower_speed, double follower_decel, double leader_speed,
                    double leader_decel, double min_gap = kDefaultMinGap) noexcept;

struct LeaderGap {
  double gap = 0.0;    // m, leader rear minus follower front
  double speed = 0.0;  // m/s
  double decel = 0.0;  // m/s^2, leader's braking limit
};

struct FollowResult {
  double speed = 0.0;
  double position = 0.0;
};

/// One step of car following: speed moves toward min(v_star, safe speed),
/// bounded by accel_max / decel_max, then the position integrates it.
FollowResult car_following_update(const VehicleState& vehicle, const std::optional<LeaderGap>& leader,
                                  double v_star, double min_gap = kDefaultMinGap) noexcept;

}  // namespace momsafe
