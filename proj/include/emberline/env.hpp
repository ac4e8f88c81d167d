#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "emberline/fire.hpp"
#include "emberline/reward.hpp"
#include "emberline/scenario.hpp"

namespace emberline {

enum class Movement : std::uint8_t { nothing, up, down, left, right };
enum class Interaction : std::uint8_t { nothing, fireline, wetline, scratchline };

[[nodiscard]] std::string_view movement_name(Movement m) noexcept;
[[nodiscard]] std::string_view interaction_name(Interaction i) noexcept;
/// Both throw ConfigError for unknown names.
[[nodiscard]] Movement parse_movement(std::string_view name);
[[nodiscard]] Interaction parse_interaction(std::string_view name);
[[nodiscard]] std::optional<MitigationKind> mitigation_of(Interaction i) noexcept;

struct EpisodeConfig {
  Cell agent_start{0, 0};
  int agent_speed = 1;
  std::vector<Movement> movements{Movement::nothing, Movement::up, Movement::down, Movement::left, Movement::right};
  std::vector<Interaction> interactions{Interaction::nothing, Interaction::fireline};
  std::vector<Attribute> attributes;
  bool normalize = true;
  std::int64_t max_agent_steps = 100000;

  /// Throws ConfigError; the agent start is checked against the grid shape.
  void validate(int rows, int cols) const;
  friend bool operator==(const EpisodeConfig&, const EpisodeConfig&) = default;
};

struct Action {
  int movement = 0;
  int interaction = 0;
  friend bool operator==(const Action&, const Action&) = default;
};

[[nodiscard]] std::size_t action_count(const EpisodeConfig& config) noexcept;
/// interaction = flat / |movements|, movement = flat % |movements|.
/// Throws OutOfRangeError past the action space.
[[nodiscard]] Action decode_action(const EpisodeConfig& config, std::size_t flat);
[[nodiscard]] std::size_t encode_action(const EpisodeConfig& config, Action action);
/// Index of `m` in the configured movements; nullopt when absent.
[[nodiscard]] std::optional<int> movement_index(const EpisodeConfig& config, Movement m) noexcept;
[[nodiscard]] std::optional<int> interaction_index(const EpisodeConfig& config, Interaction i) noexcept;

/// The unmitigated rollout an episode is scored against.
struct BenchmarkTrace {
  Cell ignition;
  bool ignited = false;                         // false when the ignition cell cannot burn
  std::vector<std::int64_t> damaged_per_t;      // burned + burning, t = 0 .. quiescence
  std::vector<std::int64_t> burned_per_t;
  std::vector<std::vector<CellStatus>> frames;  // status map per t
  Grid<std::int32_t> final_burned_map;
  std::int64_t total_timesteps = 0;
  std::int64_t total_burned = 0;

  [[nodiscard]] const std::vector<CellStatus>& frame_at(std::int64_t t) const;
  friend bool operator==(const BenchmarkTrace&, const BenchmarkTrace&) = default;
};

/// Fixed ignition when configured, otherwise uniform over burnable cells.
[[nodiscard]] Cell choose_ignition(const Scenario& scenario, std::uint64_t episode_seed);

/// Throws StepCapExceeded when the fire outlives the scenario's step cap.
[[nodiscard]] BenchmarkTrace run_benchmark(const Scenario& scenario, Cell ignition);

/// Channel-major stack of rows x cols planes.
struct Observation {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<float> data;

  [[nodiscard]] bool empty() const noexcept { return data.empty(); }
  [[nodiscard]] std::span<const float> channel(int k) const;
  [[nodiscard]] float at(int k, Cell c) const;
};

[[nodiscard]] Observation encode_observation(const FireState& state, Cell agent, const BenchmarkTrace& trace,
                                             const Scenario& scenario, const EpisodeConfig& config);

struct StepInfo {
  std::int64_t agent_step = 0;
  std::int64_t t = 0;
  Cell agent;
  Action action;
  bool fire_advanced = false;
  bool bonus = false;
  DamageSnapshot damage;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

struct ResetInfo {
  Cell ignition;
  std::int64_t total_endangered = 0;
  bool degenerate = false;  // the benchmark burns nothing, so every reward is 0
};

/// Single-owner episode driver. Construct once per rollout thread.
class Environment {
 public:
  Environment(std::shared_ptr<const Scenario> scenario, EpisodeConfig config);

  /// Skip observation encoding for policies that never read it.
  void set_observe(bool observe) noexcept { observe_ = observe; }

  Observation reset(std::uint64_t episode_seed);
  /// Reuses a benchmark computed earlier for the same ignition.
  Observation reset(std::uint64_t episode_seed, std::shared_ptr<const BenchmarkTrace> trace);
  /// Throws EpisodeError after termination or truncation, OutOfRangeError
  /// for action indices outside the configured lists.
  StepResult step(Action action);

  [[nodiscard]] const Scenario& scenario() const noexcept { return *scenario_; }
  [[nodiscard]] const EpisodeConfig& config() const noexcept { return config_; }
  [[nodiscard]] const FireState& fire() const noexcept { return live_; }
  [[nodiscard]] const BenchmarkTrace& benchmark() const noexcept { return *trace_; }
  [[nodiscard]] std::shared_ptr<const BenchmarkTrace> benchmark_ptr() const noexcept { return trace_; }
  [[nodiscard]] const ResetInfo& reset_info() const noexcept { return reset_info_; }
  [[nodiscard]] Cell agent() const noexcept { return agent_; }
  [[nodiscard]] std::int64_t agent_steps() const noexcept { return agent_steps_; }
  [[nodiscard]] bool done() const noexcept { return terminated_ || truncated_; }
  [[nodiscard]] bool terminated() const noexcept { return terminated_; }
  [[nodiscard]] bool truncated() const noexcept { return truncated_; }
  [[nodiscard]] double reward_sum() const noexcept { return reward_sum_; }
  [[nodiscard]] double bonus_sum() const noexcept { return bonus_sum_; }
  [[nodiscard]] std::int64_t bonus_count() const noexcept { return bonus_count_; }
  [[nodiscard]] const DamageSnapshot& damage() const noexcept { return last_; }
  [[nodiscard]] Observation observe() const;
  /// Metrics for the episode so far; final once done().
  [[nodiscard]] MetricSummary metrics() const;

 private:
  DamageSnapshot snapshot(bool at_end) const;

  std::shared_ptr<const Scenario> scenario_;
  EpisodeConfig config_;
  std::shared_ptr<const BenchmarkTrace> trace_;
  FireState live_;
  ResetInfo reset_info_;
  Cell agent_;
  DamageSnapshot last_;
  std::int64_t agent_steps_ = 0;
  double reward_sum_ = 0.0;
  double bonus_sum_ = 0.0;
  std::int64_t bonus_count_ = 0;
  bool terminated_ = false;
  bool truncated_ = false;
  bool started_ = false;
  bool observe_ = true;
};

}  // namespace emberline
