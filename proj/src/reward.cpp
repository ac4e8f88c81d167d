#include "emberline/reward.hpp"

#include <stdexcept>

namespace emberline {

std::int64_t damaged_bench(std::span<const std::int64_t> damaged_per_t, std::int64_t t) noexcept {
  if (damaged_per_t.empty()) return 0;
  if (t < 0) t = 0;
  const auto last = static_cast<std::int64_t>(damaged_per_t.size()) - 1;
  return damaged_per_t[static_cast<std::size_t>(t < last ? t : last)];
}

double step_reward(const DamageSnapshot& prev, const DamageSnapshot& cur, std::int64_t total_endangered) noexcept {
  if (total_endangered <= 0) return 0.0;
  const std::int64_t new_bench = damaged_bench(cur) - damaged_bench(prev);
  const std::int64_t new_sim = damaged_sim(cur) - damaged_sim(prev);
  return static_cast<double>(new_bench - new_sim) / static_cast<double>(total_endangered);
}

double mitigation_bonus(std::int64_t area) {
  if (area < 1) throw std::invalid_argument("mitigation_bonus: area must be >= 1");
  return 0.25 / static_cast<double>(area);
}

double area_saved(std::int64_t sim_burned, std::int64_t sim_mitigated, std::int64_t bench_burned) noexcept {
  return static_cast<double>(bench_burned - (sim_burned + sim_mitigated));
}

double timesteps_saved(std::int64_t sim_t, std::int64_t bench_t) {
  if (sim_t < 1 || bench_t < 1) throw std::invalid_argument("timesteps_saved: timestep counts must be >= 1");
  return static_cast<double>(bench_t - sim_t);
}

double burn_rate(std::int64_t burned, std::int64_t mitigated, std::int64_t timesteps) {
  if (timesteps < 1) throw std::invalid_argument("burn_rate: timesteps must be >= 1");
  return static_cast<double>(burned + mitigated) / static_cast<double>(timesteps) * 100.0;
}

double burn_rate_reduction(double sim_rate, double bench_rate) {
  if (!(sim_rate >= 0.0) || !(bench_rate >= 0.0)) throw std::invalid_argument("burn_rate_reduction: rates must be >= 0");
  return bench_rate - sim_rate;
}

}  // namespace emberline
