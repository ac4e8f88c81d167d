#pragma once

#include <cstdint>
#include <string_view>

namespace emberline {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Named sub-seed: mix64(mix64(root ^ fnv1a64(name)) + index).
///
/// Every component that needs randomness (terrain, wind, ignition, policy,
/// optimizer, episode) draws from its own sub-seed so that changing one
/// component's consumption never perturbs another.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index = 0) noexcept {
  return mix64(mix64(root ^ fnv1a64(name)) + index);
}

/// Stateless uniform draw in [0, 1) keyed by (seed, counter).
constexpr double unit_hash(std::uint64_t seed, std::uint64_t counter) noexcept {
  return static_cast<double>(mix64(seed ^ mix64(counter)) >> 11) * 0x1.0p-53;
}

}  // namespace emberline
