#include "momsafe/risk_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "momsafe/domain.hpp"
#include "momsafe/units.hpp"

namespace momsafe {

CollisionOutcome inelastic_collision(double m_i, double v_i, double m_j, double v_j) noexcept {
  const double total = m_i + m_j;
  const double closing = std::abs(v_i - v_j);
  return {
      .v_shared_after = (m_i * v_i + m_j * v_j) / total,
      .delta_v_striker = m_j / total * closing,
      .delta_v_struck = m_i / total * closing,
  };
}

std::string_view to_string(CollisionOrientation o) noexcept {
  return o == CollisionOrientation::frontal ? "frontal" : "rear_end";
}

std::string_view to_string(InjuryLevel l) noexcept {
  switch (l) {
    case InjuryLevel::mais1: return "MAIS1+";
    case InjuryLevel::mais2: return "MAIS2+";
    case InjuryLevel::mais3: return "MAIS3+";
    case InjuryLevel::mais4: return "MAIS4+";
    case InjuryLevel::mais5: return "MAIS5+";
    case InjuryLevel::fatality: return "fatality";
  }
  return "?";
}

CollisionOrientation orientation_from_string(std::string_view s) {
  if (s == "frontal") return CollisionOrientation::frontal;
  if (s == "rear_end" || s == "rear-end") return CollisionOrientation::rear_end;
  throw ConfigError(fmt::format("unknown collision orientation '{}'", s));
}

InjuryLevel injury_level_from_string(std::string_view s) {
  for (auto l : {InjuryLevel::mais1, InjuryLevel::mais2, InjuryLevel::mais3, InjuryLevel::mais4,
                 InjuryLevel::mais5, InjuryLevel::fatality}) {
    if (to_string(l) == s) return l;
  }
  throw ConfigError(fmt::format("unknown injury level '{}'", s));
}

double injury_probability(const InjuryCurve& curve, double delta_v) {
  const double dv_kmh = ms_to_kmh(delta_v);
  // Small tolerance so that a value converted back from the range bound is accepted.
  constexpr double eps = 1e-9;
  if (dv_kmh < curve.valid_min_kmh - eps || dv_kmh > curve.valid_max_kmh + eps) {
    throw RangeError(fmt::format("delta-v {:.3f} km/h outside valid range [{}, {}] of {} {} curve",
                                 dv_kmh, curve.valid_min_kmh, curve.valid_max_kmh,
                                 to_string(curve.orientation), to_string(curve.level)));
  }
  return 1.0 / (1.0 + std::exp(-(curve.intercept + curve.slope * dv_kmh)));
}

double delta_v_for_probability(const InjuryCurve& curve, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie in (0,1)");
  if (!(curve.slope > 0.0)) throw std::domain_error("injury curve with slope <= 0 is not invertible");
  const double logit = std::log(p / (1.0 - p));
  return kmh_to_ms((logit - curve.intercept) / curve.slope);
}

namespace {

constexpr double kAnchorProbability = 0.01;
constexpr double kFrontalMais3AnchorKmh = 23.19;
constexpr double kRearMais3AnchorKmh = 30.86;

InjuryCurve anchored(CollisionOrientation o, InjuryLevel l, double slope, double anchor_kmh,
                     double lo, double hi) {
  const double logit = std::log(kAnchorProbability / (1.0 - kAnchorProbability));
  return {o, l, logit - slope * anchor_kmh, slope, lo, hi};
}

}  // namespace

std::vector<InjuryCurve> default_injury_curves() {
  using enum InjuryLevel;
  constexpr auto F = CollisionOrientation::frontal;
  constexpr auto R = CollisionOrientation::rear_end;
  return {
      {F, mais1, -1.60, 0.080, 0.0, 150.0},
      {F, mais2, -4.00, 0.090, 0.0, 150.0},
      anchored(F, mais3, 0.100, kFrontalMais3AnchorKmh, 0.0, 150.0),
      {F, mais4, -7.80, 0.095, 0.0, 150.0},
      {F, mais5, -8.60, 0.095, 0.0, 150.0},
      {F, fatality, -9.00, 0.095, 0.0, 150.0},
      // The rear-end MAIS1+ model crosses the more severe levels at high
      // delta-v; it is only trusted up to 85 km/h.
      {R, mais1, -1.00, 0.035, 0.0, 85.0},
      {R, mais2, -4.50, 0.070, 0.0, 150.0},
      anchored(R, mais3, 0.080, kRearMais3AnchorKmh, 0.0, 150.0),
      {R, mais4, -8.00, 0.080, 0.0, 150.0},
      {R, mais5, -8.80, 0.080, 0.0, 150.0},
      {R, fatality, -9.20, 0.080, 0.0, 150.0},
  };
}

std::vector<InjuryCurve> parse_injury_curves(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("injury curves: {}", e.what()));
  }
  if (!doc.contains("curves") || !doc["curves"].is_array()) {
    throw ConfigError("injury curves: expected top-level 'curves' array");
  }
  std::vector<InjuryCurve> out;
  for (const auto& rec : doc["curves"]) {
    try {
      InjuryCurve c;
      c.orientation = orientation_from_string(rec.at("orientation").get<std::string>());
      c.level = injury_level_from_string(rec.at("level").get<std::string>());
      c.intercept = rec.at("intercept").get<double>();
      c.slope = rec.at("slope").get<double>();
      const auto& range = rec.at("valid_range_kmh");
      c.valid_min_kmh = range.at(0).get<double>();
      c.valid_max_kmh = range.at(1).get<double>();
      if (!(c.valid_min_kmh < c.valid_max_kmh)) {
        throw ConfigError("valid_range_kmh must be increasing");
      }
      out.push_back(c);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("injury curves: bad record: {}", e.what()));
    }
  }
  return out;
}

std::vector<InjuryCurve> load_injury_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open injury curve file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_injury_curves(ss.str());
}

std::string injury_curves_to_json(std::span<const InjuryCurve> curves) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : curves) {
    nlohmann::ordered_json rec;
    rec["orientation"] = to_string(c.orientation);
    rec["level"] = to_string(c.level);
    rec["intercept"] = c.intercept;
    rec["slope"] = c.slope;
    rec["valid_range_kmh"] = {c.valid_min_kmh, c.valid_max_kmh};
    arr.push_back(rec);
  }
  nlohmann::ordered_json doc;
  doc["curves"] = arr;
  return doc.dump(2) + "\n";
}

const InjuryCurve& find_curve(std::span<const InjuryCurve> curves, CollisionOrientation o,
                              InjuryLevel level) {
  auto it = std::find_if(curves.begin(), curves.end(),
                         [&](const InjuryCurve& c) { return c.orientation == o && c.level == level; });
  if (it == curves.end()) {
    throw ConfigError(fmt::format("no {} {} curve configured", to_string(o), to_string(level)));
  }
  return *it;
}

void AdvisoryBounds::validate() const {
  if (!(dv_cap_self > 0.0) || !(dv_cap_other > 0.0)) {
    throw ConfigError("advisory delta-v caps must both be > 0");
  }
}

AdvisoryBounds default_advisory_bounds() noexcept {
  return {kmh_to_ms(kFrontalMais3AnchorKmh), kmh_to_ms(kRearMais3AnchorKmh)};
}

RiskExceedance exceedance_of(const DeltaVSample& s, const AdvisoryBounds& bounds) noexcept {
  return {std::max(s.self - bounds.dv_cap_self, 0.0), std::max(s.other - bounds.dv_cap_other, 0.0)};
}

RiskExceedance risk_exceedance(std::span<const DeltaVSample> trace, const AdvisoryBounds& bounds) noexcept {
  RiskExceedance r;
  for (const auto& s : trace) {
    const auto e = exceedance_of(s, bounds);
    r.self += e.self;
    r.other += e.other;
  }
  return r;
}

}  // namespace momsafe
