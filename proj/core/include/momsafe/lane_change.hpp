#pragma once

#include <optional>
#include <string_view>

#include "momsafe/car_following.hpp"

namespace momsafe {

enum class LaneChange { stay, move_left, move_right };

std::string_view to_string(LaneChange c) noexcept;

/// A vehicle adjacent in the longitudinal order of some lane. For a leader
/// `gap` is leader rear minus own front; for a follower it is own rear minus
/// follower front.
struct Neighbour {
  double gap = 0.0;
  double speed = 0.0;
  double decel = 0.0;
};

/// Everything the gap-acceptance rule looks at. Lane 0 is the rightmost.
struct Surroundings {
  int lane = 0;
  int lanes = 1;
  double speed = 0.0;
  double desired_speed = 0.0;
  double decel = 0.0;
  double lookahead = 300.0;
  double min_gap = kDefaultMinGap;
  std::optional<Neighbour> leader;
  std::optional<Neighbour> left_leader;
  std::optional<Neighbour> left_follower;
  std::optional<Neighbour> right_leader;
  std::optional<Neighbour> right_follower;
};

/// Keep-right gap acceptance. Move left when the current-lane leader within
/// the lookahead is slower than the desired speed, the left lane is no worse
/// and both new gaps are acceptable. Move right when the right lane has no
/// slower leader within the lookahead and both new gaps are acceptable.
LaneChange lane_change_decide(const Surroundings& s) noexcept;

}  // namespace momsafe
