#pragma once

#include <cstdint>
#include <span>

namespace emberline {

/// Live and benchmark damage counts at one fire timestep.
struct DamageSnapshot {
  std::int64_t burned = 0;
  std::int64_t burning = 0;
  std::int64_t mitigated = 0;
  std::int64_t bench_burned = 0;
  std::int64_t bench_burning = 0;
  friend bool operator==(const DamageSnapshot&, const DamageSnapshot&) = default;
};

struct MetricSummary {
  double area_saved = 0.0;
  double timesteps_saved = 0.0;
  double burn_rate_sim = 0.0;
  double burn_rate_bench = 0.0;
  double burn_rate_reduction = 0.0;
  double episode_reward_sum = 0.0;
  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

[[nodiscard]] constexpr std::int64_t damaged_sim(const DamageSnapshot& s) noexcept {
  return s.burned + s.burning + s.mitigated;
}
[[nodiscard]] constexpr std::int64_t damaged_bench(const DamageSnapshot& s) noexcept {
  return s.bench_burned + s.bench_burning;
}
/// Benchmark damage at fire timestep t; past the end of the trace the final
/// value holds. An empty trace yields 0.
[[nodiscard]] std::int64_t damaged_bench(std::span<const std::int64_t> damaged_per_t, std::int64_t t) noexcept;

/// New benchmark damage minus new live damage, as a fraction of the land the
/// benchmark fire eventually burns. Returns 0 when total_endangered is 0.
[[nodiscard]] double step_reward(const DamageSnapshot& prev, const DamageSnapshot& cur,
                                 std::int64_t total_endangered) noexcept;

/// Throws std::invalid_argument for area < 1.
[[nodiscard]] double mitigation_bonus(std::int64_t area);

/// Positive values are improvements over the benchmark in all four metrics.
[[nodiscard]] double area_saved(std::int64_t sim_burned, std::int64_t sim_mitigated, std::int64_t bench_burned) noexcept;
[[nodiscard]] double timesteps_saved(std::int64_t sim_t, std::int64_t bench_t);
/// Percent of the grid lost per timestep. Throws std::invalid_argument when timesteps < 1.
[[nodiscard]] double burn_rate(std::int64_t burned, std::int64_t mitigated, std::int64_t timesteps);
[[nodiscard]] double burn_rate_reduction(double sim_rate, double bench_rate);

}  // namespace emberline
