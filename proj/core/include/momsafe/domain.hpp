#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace momsafe {

/// Raised for any configuration that violates a documented invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VehicleId {
  std::uint64_t value = 0;
  friend constexpr bool operator==(VehicleId, VehicleId) = default;
  friend constexpr auto operator<=>(VehicleId, VehicleId) = default;
};

/// Static properties of one vehicle. Mass and top speed drive the momentum
/// classification; length and the acceleration limits only matter to the
/// simulator.
struct VehicleSpec {
  VehicleId id{};
  double mass = 0.0;        // kg
  double v_max_self = 0.0;  // m/s, physical top speed
  double length = 0.0;      // m
  double accel_max = 0.0;   // m/s^2
  double decel_max = 0.0;   // m/s^2

  void validate() const;
};

/// Dynamic state of one simulated vehicle.
struct VehicleState {
  VehicleSpec spec{};
  int lane = 0;
  double position = 0.0;  // m, front bumper along the current edge
  double speed = 0.0;     // m/s
  long entered_at = 0;    // step t_alpha
  std::optional<long> exited_at;  // step t_omega
};

struct RoadEdge {
  std::string id;
  double length = 0.0;   // m
  int lanes = 1;
  double v_limit = 0.0;  // m/s
  double v_min = 0.0;    // m/s, 0 when the road has no minimum

  void validate() const;
};

/// Parameters of p_yes(pi) = delta_l + delta_u / (1 + exp(-lambda (pi - pi_0))).
struct LogisticParams {
  double delta_l = 0.05;
  double delta_u = 0.9;
  double lambda = 1.0;
  double pi_0 = 0.0;

  void validate() const;
};

struct MomentumClass {
  std::string name;
  double rho_lower = -std::numeric_limits<double>::infinity();  // exclusive, kg m/s
  double rho_upper = std::numeric_limits<double>::infinity();   // inclusive, kg m/s
  LogisticParams gate_params{};
};

/// Maximum driving momentum of a vehicle on an edge: mass times the lower of
/// its own top speed and the road limit.
double rho_max(const VehicleSpec& spec, const RoadEdge& edge) noexcept;

/// Throws ConfigError unless the classes are ordered, contiguous and cover
/// (0, inf) with each gate parameter set valid.
void validate_classes(std::span<const MomentumClass> classes);

/// Index of the unique class with rho_lower < rho <= rho_upper. The lower
/// class owns a shared boundary.
std::size_t classify_index(double rho, std::span<const MomentumClass> classes);

const MomentumClass& classify(double rho, std::span<const MomentumClass> classes);

/// The three-class partition at 1e4 and 3.3e5 kg m/s, with the given gate
/// parameters for classes I, II and III.
std::vector<MomentumClass> three_class_partition(const LogisticParams& class_i,
                                                 const LogisticParams& class_ii,
                                                 const LogisticParams& class_iii);

inline constexpr double kClassIUpperRho = 1.0e4;
inline constexpr double kClassIIUpperRho = 3.3e5;

}  // namespace momsafe
