#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emberline/env.hpp"

namespace emberline {

class EpisodeLog;

/// Decision rule over (observation, step index). `agent` is the agent's cell
/// before the action, as any observer of channel 0 could read it.
class Policy {
 public:
  virtual ~Policy() = default;
  /// Called once after each reset, before the first act().
  virtual void begin_episode(const EpisodeConfig& config, int rows, int cols) { (void)config, (void)rows, (void)cols; }
  virtual Action act(const Observation& obs, std::int64_t step, Cell agent) = 0;
  /// False lets the environment skip observation encoding.
  [[nodiscard]] virtual bool needs_observation() const noexcept { return false; }
  /// True when actions depend on neither the seed nor the observation.
  [[nodiscard]] virtual bool open_loop() const noexcept { return false; }
};

/// Builds a fresh policy for one episode from that episode's policy seed.
using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t policy_seed)>;

/// Always (nothing, nothing). Throws ConfigError when "nothing" is missing
/// from either action list.
class NoopPolicy final : public Policy {
 public:
  void begin_episode(const EpisodeConfig& config, int rows, int cols) override;
  Action act(const Observation& obs, std::int64_t step, Cell agent) override;
  [[nodiscard]] bool open_loop() const noexcept override { return true; }

 private:
  Action action_;
};

/// Uniform over the flat action space; a pure function of (seed, step).
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed) {}
  void begin_episode(const EpisodeConfig& config, int rows, int cols) override;
  Action act(const Observation& obs, std::int64_t step, Cell agent) override;

 private:
  std::uint64_t seed_;
  EpisodeConfig config_;
};

enum class LineAxis : std::uint8_t { row, col };

/// Walks to the target row (or column), lays a fireline on it toward the
/// given direction until the grid edge, then idles.
class ScriptedLinePolicy final : public Policy {
 public:
  ScriptedLinePolicy(LineAxis axis, int index, Movement direction);
  void begin_episode(const EpisodeConfig& config, int rows, int cols) override;
  Action act(const Observation& obs, std::int64_t step, Cell agent) override;
  [[nodiscard]] bool open_loop() const noexcept override { return true; }

 private:
  LineAxis axis_;
  int index_;
  Movement direction_;
  int rows_ = 0;
  int cols_ = 0;
  bool laying_ = false;
  bool finished_ = false;
  std::vector<int> move_;  // movement indices by Movement value, -1 when absent
  int nothing_ = 0;   // movement index
  int none_ = 0;      // interaction index
  int fireline_ = 0;
};

/// Fireline segments; each is rasterized as a 4-connected line so that the
/// result blocks diagonal spread.
struct FirelinePlan {
  std::vector<std::pair<Cell, Cell>> segments;

  /// Distinct cells in placement order.
  [[nodiscard]] std::vector<Cell> cells() const;
  [[nodiscard]] std::size_t length() const { return cells().size(); }
  friend bool operator==(const FirelinePlan&, const FirelinePlan&) = default;
};

/// Cells from a to b inclusive, each step moving one row or one column.
[[nodiscard]] std::vector<Cell> rasterize_line(Cell a, Cell b);

[[nodiscard]] std::string plan_to_json(const FirelinePlan& plan);
/// Throws ConfigError on malformed input.
[[nodiscard]] FirelinePlan plan_from_json(std::string_view text);
/// Throws OutOfRangeError for endpoints off the grid and std::invalid_argument
/// when the plan exceeds `budget` cells (budget < 0 disables the check).
void validate_plan(const FirelinePlan& plan, int rows, int cols, std::int64_t budget = -1);

/// Executes a plan: for each segment, walks (rows first) to its start, then
/// places firelines cell by cell along the rasterized line. Idles afterwards.
class PlanPolicy final : public Policy {
 public:
  explicit PlanPolicy(FirelinePlan plan) : plan_(std::move(plan)) {}
  void begin_episode(const EpisodeConfig& config, int rows, int cols) override;
  Action act(const Observation& obs, std::int64_t step, Cell agent) override;
  [[nodiscard]] bool open_loop() const noexcept override { return true; }
  [[nodiscard]] const std::vector<Action>& script() const noexcept { return script_; }

 private:
  FirelinePlan plan_;
  std::vector<Action> script_;
  Action idle_;
};

[[nodiscard]] PolicyFactory noop_policy();
[[nodiscard]] PolicyFactory random_policy();
[[nodiscard]] PolicyFactory scripted_line_policy(LineAxis axis, int index, Movement direction);
[[nodiscard]] PolicyFactory plan_policy(FirelinePlan plan);

/// Thread-safe memo of benchmark rollouts by ignition cell for one scenario.
class BenchmarkCache {
 public:
  explicit BenchmarkCache(std::shared_ptr<const Scenario> scenario) : scenario_(std::move(scenario)) {}
  [[nodiscard]] std::shared_ptr<const BenchmarkTrace> get(Cell ignition);
  [[nodiscard]] const std::shared_ptr<const Scenario>& scenario() const noexcept { return scenario_; }

 private:
  std::shared_ptr<const Scenario> scenario_;
  std::mutex mutex_;
  std::map<Cell, std::shared_ptr<const BenchmarkTrace>> traces_;
};

struct EpisodeResult {
  std::uint64_t episode_seed = 0;
  Cell ignition;
  MetricSummary metrics;
  std::int64_t agent_steps = 0;
  std::int64_t fire_steps = 0;
  bool terminated = false;
  bool truncated = false;
  bool degenerate = false;
  double bonus_sum = 0.0;
};

/// Runs one episode to termination or truncation.
EpisodeResult run_episode(Environment& env, Policy& policy, std::uint64_t episode_seed,
                          std::shared_ptr<const BenchmarkTrace> trace = nullptr, EpisodeLog* log = nullptr);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
};

[[nodiscard]] Stat summarize(const std::vector<double>& values);

struct EvalReport {
  std::vector<EpisodeResult> episodes;
  Stat reward_sum;
  Stat area_saved;
  Stat timesteps_saved;
  Stat burn_rate_reduction;
  /// Recomputes the aggregates from `episodes`.
  void aggregate();
};

[[nodiscard]] nlohmann::json report_json(const EvalReport& report);
[[nodiscard]] std::string report_to_json(const EvalReport& report, int indent = 2);

/// Episode i uses seed derive_seed(root_seed, "episode", i) and a policy
/// built from derive_seed(root_seed, "policy", i). Episodes run in parallel;
/// the report is independent of thread count.
[[nodiscard]] EvalReport evaluate_policy(const PolicyFactory& factory, std::shared_ptr<const Scenario> scenario,
                                         const EpisodeConfig& config, int n_episodes, std::uint64_t root_seed,
                                         BenchmarkCache* cache = nullptr);

struct CemParams {
  int population = 64;
  double elite_fraction = 0.125;
  int iterations = 20;
  int segments = 4;
  int seed_panel = 8;
  double init_std = 0.0;  // 0: a quarter of the larger grid side
  double min_std = 0.5;
  int max_resample = 32;
  friend bool operator==(const CemParams&, const CemParams&) = default;
};

struct CemIteration {
  int iteration = 0;
  double elite_mean = 0.0;
  double best = 0.0;
  int feasible = 0;
};

struct OptimizeResult {
  FirelinePlan plan;
  EvalReport report;
  std::vector<CemIteration> history;
};

/// Cross-entropy search over segment endpoints maximizing mean area_saved
/// over the seed panel. Throws std::invalid_argument for budget < 1.
[[nodiscard]] OptimizeResult optimize_fireline(std::shared_ptr<const Scenario> scenario, const EpisodeConfig& config,
                                               std::int64_t budget, const CemParams& params, std::uint64_t root_seed);

}  // namespace emberline
