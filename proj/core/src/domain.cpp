#include "momsafe/domain.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace momsafe {

void VehicleSpec::validate() const {
  if (!(mass > 0.0)) throw ConfigError(fmt::format("vehicle {}: mass must be > 0", id.value));
  if (!(v_max_self >= 0.0)) throw ConfigError(fmt::format("vehicle {}: v_max_self must be >= 0", id.value));
  if (!(length > 0.0)) throw ConfigError(fmt::format("vehicle {}: length must be > 0", id.value));
  if (!(accel_max > 0.0) || !(decel_max > 0.0)) {
    throw ConfigError(fmt::format("vehicle {}: accel_max and decel_max must be > 0", id.value));
  }
}

void RoadEdge::validate() const {
  if (!(length > 0.0)) throw ConfigError(fmt::format("edge '{}': length must be > 0", id));
  if (lanes < 1) throw ConfigError(fmt::format("edge '{}': lanes must be >= 1", id));
  if (!(v_limit > 0.0)) throw ConfigError(fmt::format("edge '{}': v_limit must be > 0", id));
  if (!(v_min >= 0.0) || v_min > v_limit) {
    throw ConfigError(fmt::format("edge '{}': need 0 <= v_min <= v_limit", id));
  }
}

void LogisticParams::validate() const {
  if (!(delta_l > 0.0 && delta_l < 1.0)) throw ConfigError("logistic delta_l must lie in (0,1)");
  if (!(delta_u > 0.0 && delta_u < 1.0 + 1e-12)) throw ConfigError("logistic delta_u must lie in (0,1]");
  if (delta_l + delta_u > 1.0 + 1e-12) throw ConfigError("logistic delta_l + delta_u must be <= 1");
  if (!(lambda > 0.0)) throw ConfigError("logistic lambda must be > 0");
  if (!std::isfinite(pi_0)) throw ConfigError("logistic pi_0 must be finite");
}

double rho_max(const VehicleSpec& spec, const RoadEdge& edge) noexcept {
  return spec.mass * std::min(spec.v_max_self, edge.v_limit);
}

void validate_classes(std::span<const MomentumClass> classes) {
  if (classes.empty()) throw ConfigError("at least one momentum class is required");
  if (classes.front().rho_lower > 0.0) {
    throw ConfigError(fmt::format("class '{}' leaves (0, {}] uncovered", classes.front().name,
                                  classes.front().rho_lower));
  }
  if (classes.back().rho_upper != std::numeric_limits<double>::infinity()) {
    throw ConfigError(fmt::format("class '{}' must extend to +inf", classes.back().name));
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    if (!(c.rho_lower < c.rho_upper)) {
      throw ConfigError(fmt::format("class '{}' has empty range", c.name));
    }
    if (i + 1 < classes.size() && c.rho_upper != classes[i + 1].rho_lower) {
      throw ConfigError(fmt::format("classes '{}' and '{}' are not contiguous", c.name,
                                    classes[i + 1].name));
    }
    c.gate_params.validate();
  }
}

std::size_t classify_index(double rho, std::span<const MomentumClass> classes) {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (rho > classes[i].rho_lower && rho <= classes[i].rho_upper) return i;
  }
  throw ConfigError(fmt::format("momentum {} is not covered by the class partition", rho));
}

const MomentumClass& classify(double rho, std::span<const MomentumClass> classes) {
  return classes[classify_index(rho, classes)];
}

std::vector<MomentumClass> three_class_partition(const LogisticParams& class_i,
                                                 const LogisticParams& class_ii,
                                                 const LogisticParams& class_iii) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {
      {"I", -inf, kClassIUpperRho, class_i},
      {"II", kClassIUpperRho, kClassIIUpperRho, class_ii},
      {"III", kClassIIUpperRho, inf, class_iii},
  };
}

}  // namespace momsafe
