#include "emberline/episode_log.hpp"

#include <ostream>

namespace emberline {

namespace {

nlohmann::json cell_json(Cell c) { return nlohmann::json::array({c.row, c.col}); }

}  // namespace

nlohmann::json metrics_json(const MetricSummary& m) {
  return {{"area_saved", m.area_saved},
          {"timesteps_saved", m.timesteps_saved},
          {"burn_rate_sim", m.burn_rate_sim},
          {"burn_rate_bench", m.burn_rate_bench},
          {"burn_rate_reduction", m.burn_rate_reduction},
          {"episode_reward_sum", m.episode_reward_sum}};
}

nlohmann::json damage_json(const DamageSnapshot& d) {
  return {{"burned", d.burned},
          {"burning", d.burning},
          {"mitigated", d.mitigated},
          {"bench_burned", d.bench_burned},
          {"bench_burning", d.bench_burning}};
}

void EpisodeLog::write(const nlohmann::json& record) { out_ << record.dump() << '\n'; }

void EpisodeLog::begin(const Environment& env, std::uint64_t episode_seed) {
  const ResetInfo& info = env.reset_info();
  write({{"type", "header"},
         {"episode_seed", episode_seed},
         {"rows", env.scenario().rows()},
         {"cols", env.scenario().cols()},
         {"ignition", cell_json(info.ignition)},
         {"agent", cell_json(env.agent())},
         {"total_endangered", info.total_endangered},
         {"benchmark_timesteps", env.benchmark().total_timesteps},
         {"degenerate", info.degenerate}});
}

void EpisodeLog::step(const Environment& env, const StepResult& result) {
  const EpisodeConfig& cfg = env.config();
  const Action a = result.info.action;
  write({{"type", "step"},
         {"step", result.info.agent_step},
         {"t", result.info.t},
         {"agent", cell_json(result.info.agent)},
         {"action",
          {{"movement", movement_name(cfg.movements[static_cast<std::size_t>(a.movement)])},
           {"interaction", interaction_name(cfg.interactions[static_cast<std::size_t>(a.interaction)])}}},
         {"reward", result.reward},
         {"fire_advanced", result.info.fire_advanced},
         {"bonus", result.info.bonus},
         {"damage", damage_json(result.info.damage)},
         {"terminated", result.terminated},
         {"truncated", result.truncated}});
}

void EpisodeLog::end(const Environment& env) {
  write({{"type", "summary"},
         {"agent_steps", env.agent_steps()},
         {"fire_steps", env.fire().t},
         {"terminated", env.terminated()},
         {"truncated", env.truncated()},
         {"degenerate", env.reset_info().degenerate},
         {"bonus_count", env.bonus_count()},
         {"bonus_sum", env.bonus_sum()},
         {"metrics", metrics_json(env.metrics())}});
  out_.flush();
}

}  // namespace emberline
