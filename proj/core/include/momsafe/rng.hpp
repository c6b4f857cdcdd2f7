#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace momsafe {

/// SplitMix64 finaliser, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seeded random stream. mt19937_64's output sequence is fixed by the
/// standard and uniform() is built from raw bits, so a given seed yields the
/// same draws on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Stream `name` of run `run` under master seed `seed`.
  static RngStream derive(std::uint64_t seed, std::string_view name, std::uint64_t run = 0) {
    return RngStream(mix64(mix64(seed ^ hash_name(name)) + run));
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace momsafe
