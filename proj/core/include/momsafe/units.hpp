#pragma once

// Internal arithmetic is SI throughout. km/h only crosses the config and
// report boundaries, through these two helpers.

namespace momsafe {

inline constexpr double kKmhPerMs = 3.6;

constexpr double kmh_to_ms(double kmh) noexcept { return kmh / kKmhPerMs; }
constexpr double ms_to_kmh(double ms) noexcept { return ms * kKmhPerMs; }

}  // namespace momsafe
