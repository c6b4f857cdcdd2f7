#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace momsafe {

/// Result of a perfectly inelastic, one-dimensional rear-end impact of a
/// striker i into a struck vehicle j.
struct CollisionOutcome {
  double v_shared_after = 0.0;  // m/s
  double delta_v_striker = 0.0; // m/s, speed change of i
  double delta_v_struck = 0.0;  // m/s, speed change of j
};

CollisionOutcome inelastic_collision(double m_i, double v_i, double m_j, double v_j) noexcept;

enum class CollisionOrientation { frontal, rear_end };

enum class InjuryLevel { mais1, mais2, mais3, mais4, mais5, fatality };

std::string_view to_string(CollisionOrientation o) noexcept;
std::string_view to_string(InjuryLevel l) noexcept;
CollisionOrientation orientation_from_string(std::string_view s);
InjuryLevel injury_level_from_string(std::string_view s);

/// Univariate logistic injury model over delta-v in km/h:
///   p(dv) = 1 / (1 + exp(-(intercept + slope * dv)))
struct InjuryCurve {
  CollisionOrientation orientation = CollisionOrientation::frontal;
  InjuryLevel level = InjuryLevel::mais3;
  double intercept = 0.0;
  double slope = 0.0;         // per km/h
  double valid_min_kmh = 0.0;
  double valid_max_kmh = 0.0;
};

/// Thrown when a query falls outside an injury curve's validity range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Probability of the curve's injury level for a speed change in m/s.
double injury_probability(const InjuryCurve& curve, double delta_v);

/// Inverse of injury_probability: the speed change (m/s) at which the curve
/// reaches probability p. Requires 0 < p < 1 and slope > 0.
double delta_v_for_probability(const InjuryCurve& curve, double p);

/// Default curve set. Frontal MAIS3+ crosses 1% at 23.19 km/h and rear-end
/// MAIS3+ at 30.86 km/h; slopes and the remaining levels are shape-only.
std::vector<InjuryCurve> default_injury_curves();

/// Reads curves from a JSON file of the form
///   {"curves": [{"orientation": "frontal", "level": "MAIS3+", "intercept": ..,
///                "slope": .., "valid_range_kmh": [lo, hi]}, ...]}
std::vector<InjuryCurve> load_injury_curves(const std::filesystem::path& path);
std::vector<InjuryCurve> parse_injury_curves(std::string_view json_text);
std::string injury_curves_to_json(std::span<const InjuryCurve> curves);

const InjuryCurve& find_curve(std::span<const InjuryCurve> curves, CollisionOrientation o,
                              InjuryLevel level);

/// Crash-severity caps: the striker's own speed change and the speed change
/// it may inflict on the struck vehicle (both m/s).
struct AdvisoryBounds {
  double dv_cap_self = 0.0;
  double dv_cap_other = 0.0;

  void validate() const;
};

/// Caps giving 1% MAIS3+ risk for the striker (frontal curve) and for the
/// struck vehicle (rear-end curve).
AdvisoryBounds default_advisory_bounds() noexcept;

struct DeltaVSample {
  double self = 0.0;   // m/s
  double other = 0.0;  // m/s
};

struct RiskExceedance {
  double self = 0.0;   // m/s * step
  double other = 0.0;  // m/s * step
};

RiskExceedance risk_exceedance(std::span<const DeltaVSample> trace, const AdvisoryBounds& bounds) noexcept;

/// Surplus of a single sample over the caps; the per-step term of
/// risk_exceedance.
RiskExceedance exceedance_of(const DeltaVSample& s, const AdvisoryBounds& bounds) noexcept;

}  // namespace momsafe
