#include "momsafe/lane_change.hpp"

namespace momsafe {

namespace {

constexpr double kSpeedTolerance = 0.1;  // m/s

bool slows_down(const std::optional<Neighbour>& leader, const Surroundings& s) {
  return leader && leader->gap <= s.lookahead && leader->speed < s.desired_speed - kSpeedTolerance;
}

bool fits_between(const std::optional<Neighbour>& leader, const std::optional<Neighbour>& follower,
                  const Surroundings& s) {
  if (leader && !gap_acceptable(leader->gap, s.speed, s.decel, leader->speed, leader->decel, s.min_gap)) {
    return false;
  }
  if (follower &&
      !gap_acceptable(follower->gap, follower->speed, follower->decel, s.speed, s.decel, s.min_gap)) {
    return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(LaneChange c) noexcept {
  switch (c) {
    case LaneChange::stay: return "stay";
    case LaneChange::move_left: return "move_left";
    case LaneChange::move_right: return "move_right";
  }
  return "?";
}

LaneChange lane_change_decide(const Surroundings& s) noexcept {
  const bool blocked = slows_down(s.leader, s);
  if (blocked && s.lane + 1 < s.lanes) {
    const bool no_worse = !s.left_leader || s.left_leader->gap > s.lookahead ||
                          s.left_leader->speed > s.leader->speed + kSpeedTolerance;
    if (no_worse && fits_between(s.left_leader, s.left_follower, s)) return LaneChange::move_left;
  }
  if (s.lane > 0 && !slows_down(s.right_leader, s) && fits_between(s.right_leader, s.right_follower, s)) {
    return LaneChange::move_right;
  }
  return LaneChange::stay;
}

}  // namespace momsafe
