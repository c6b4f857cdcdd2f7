#include "momsafe/car_following.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace momsafe {

double braking_distance(double v, double decel) noexcept {
  if (v <= 0.0) return 0.0;
  const double n = std::floor(v / decel);
  return (n + 1.0) * v - decel * n * (n + 1.0) / 2.0;
}

double max_speed_for_distance(double budget, double decel) noexcept {
  if (budget <= 0.0) return 0.0;
  // Largest integer n with decel * n (n + 1) / 2 <= budget.
  double n = std::floor((-1.0 + std::sqrt(1.0 + 8.0 * budget / decel)) / 2.0);
  while (n > 0.0 && decel * n * (n + 1.0) / 2.0 > budget) n -= 1.0;
  while (decel * (n + 1.0) * (n + 2.0) / 2.0 <= budget) n += 1.0;
  return (budget + decel * n * (n + 1.0) / 2.0) / (n + 1.0);
}

double safe_speed(double gap, double leader_speed, double leader_decel, double follower_decel,
                  double min_gap) noexcept {
  const double b_star = std::max(leader_decel, follower_decel);
  const double leader_after = braking_distance(leader_speed, b_star) - std::max(leader_speed, 0.0);
  return max_speed_for_distance(gap + leader_after - min_gap, follower_decel);
}

bool gap_acceptable(double gap, double follower_speed, double follower_decel, double leader_speed,
                    double leader_decel, double min_gap) noexcept {
  if (gap < min_gap) return false;
  const double v_safe = safe_speed(gap, leader_speed, leader_decel, follower_decel, min_gap);
  return v_safe >= follower_speed - 0.5 * follower_decel;
}

FollowResult car_following_update(const VehicleState& vehicle, const std::optional<LeaderGap>& leader,
                                  double v_star, double min_gap) noexcept {
  const auto& spec = vehicle.spec;
  const double v = vehicle.speed;
  double upper = std::min({v + spec.accel_max, v_star, spec.v_max_self});
  double v_safe = std::numeric_limits<double>::infinity();
  if (leader) {
    v_safe = safe_speed(leader->gap, leader->speed, leader->decel, spec.decel_max, min_gap);
    upper = std::min(upper, v_safe);
  }
  const double lower = std::max(0.0, v - spec.decel_max);
  const double next = std::max(0.0, std::min(std::max(upper, lower), v_safe));
  return {next, vehicle.position + next};
}

}  // namespace momsafe
