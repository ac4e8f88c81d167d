#include "emberline/env.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "emberline/errors.hpp"
#include "emberline/seeding.hpp"

namespace emberline {

namespace {

constexpr std::array<std::string_view, 5> kMovementNames{"nothing", "up", "down", "left", "right"};
constexpr std::array<std::string_view, 4> kInteractionNames{"nothing", "fireline", "wetline", "scratchline"};

std::string join(std::span<const std::string_view> names) {
  std::string out;
  for (std::string_view n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

Cell moved(Cell c, Movement m, int rows, int cols) noexcept {
  switch (m) {
    case Movement::nothing: break;
    case Movement::up: c.row = std::max(c.row - 1, 0); break;
    case Movement::down: c.row = std::min(c.row + 1, rows - 1); break;
    case Movement::left: c.col = std::max(c.col - 1, 0); break;
    case Movement::right: c.col = std::min(c.col + 1, cols - 1); break;
  }
  return c;
}

float normalized(double v, const Range& r) noexcept {
  if (!(r.max > r.min)) return 0.0f;
  return static_cast<float>(std::clamp((v - r.min) / (r.max - r.min), 0.0, 1.0));
}

}  // namespace

std::string_view movement_name(Movement m) noexcept { return kMovementNames[static_cast<std::size_t>(m)]; }
std::string_view interaction_name(Interaction i) noexcept { return kInteractionNames[static_cast<std::size_t>(i)]; }

Movement parse_movement(std::string_view name) {
  for (std::size_t k = 0; k < kMovementNames.size(); ++k) {
    if (kMovementNames[k] == name) return static_cast<Movement>(k);
  }
  throw ConfigError("environment.movements",
                    "unknown movement '" + std::string(name) + "' (expected one of " + join(kMovementNames) + ")");
}

Interaction parse_interaction(std::string_view name) {
  for (std::size_t k = 0; k < kInteractionNames.size(); ++k) {
    if (kInteractionNames[k] == name) return static_cast<Interaction>(k);
  }
  throw ConfigError("environment.interactions",
                    "unknown interaction '" + std::string(name) + "' (expected one of " + join(kInteractionNames) + ")");
}

std::optional<MitigationKind> mitigation_of(Interaction i) noexcept {
  switch (i) {
    case Interaction::nothing: return std::nullopt;
    case Interaction::fireline: return MitigationKind::fireline;
    case Interaction::wetline: return MitigationKind::wetline;
    case Interaction::scratchline: return MitigationKind::scratchline;
  }
  return std::nullopt;
}

void EpisodeConfig::validate(int rows, int cols) const {
  if (agent_speed < 1) throw ConfigError("environment.agent_speed", "must be >= 1");
  if (movements.empty()) throw ConfigError("environment.movements", "must not be empty");
  if (interactions.empty()) throw ConfigError("environment.interactions", "must not be empty");
  if (max_agent_steps < 1) throw ConfigError("environment.max_agent_steps", "must be >= 1");
  if (agent_start.row < 0 || agent_start.col < 0 || agent_start.row >= rows || agent_start.col >= cols) {
    throw ConfigError("environment.agent_start", "cell [" + std::to_string(agent_start.row) + ", " +
                                                     std::to_string(agent_start.col) + "] is outside the " +
                                                     std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
}

std::size_t action_count(const EpisodeConfig& config) noexcept {
  return config.movements.size() * config.interactions.size();
}

Action decode_action(const EpisodeConfig& config, std::size_t flat) {
  if (flat >= action_count(config)) {
    throw OutOfRangeError("decode_action: index " + std::to_string(flat) + " outside action space of size " +
                          std::to_string(action_count(config)));
  }
  const std::size_t m = config.movements.size();
  return Action{static_cast<int>(flat % m), static_cast<int>(flat / m)};
}

std::size_t encode_action(const EpisodeConfig& config, Action action) {
  const auto m = static_cast<int>(config.movements.size());
  const auto n = static_cast<int>(config.interactions.size());
  if (action.movement < 0 || action.movement >= m || action.interaction < 0 || action.interaction >= n) {
    throw OutOfRangeError("encode_action: action outside the configured lists");
  }
  return static_cast<std::size_t>(action.interaction) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(action.movement);
}

std::optional<int> movement_index(const EpisodeConfig& config, Movement m) noexcept {
  const auto it = std::find(config.movements.begin(), config.movements.end(), m);
  if (it == config.movements.end()) return std::nullopt;
  return static_cast<int>(it - config.movements.begin());
}

std::optional<int> interaction_index(const EpisodeConfig& config, Interaction i) noexcept {
  const auto it = std::find(config.interactions.begin(), config.interactions.end(), i);
  if (it == config.interactions.end()) return std::nullopt;
  return static_cast<int>(it - config.interactions.begin());
}

const std::vector<CellStatus>& BenchmarkTrace::frame_at(std::int64_t t) const {
  if (frames.empty()) throw EpisodeError("benchmark trace has no frames");
  const auto last = static_cast<std::int64_t>(frames.size()) - 1;
  return frames[static_cast<std::size_t>(std::clamp<std::int64_t>(t, 0, last))];
}

Cell choose_ignition(const Scenario& scenario, std::uint64_t episode_seed) {
  if (scenario.fire.ignition) return *scenario.fire.ignition;
  const LayerStack& stack = scenario.stack;
  std::vector<std::size_t> burnable;
  burnable.reserve(stack.cell_count());
  for (std::size_t i = 0; i < stack.cell_count(); ++i) {
    if (stack.fuel_at(i).burnable()) burnable.push_back(i);
  }
  if (burnable.empty()) return Cell{0, 0};
  const std::uint64_t h = mix64(derive_seed(episode_seed, "ignition"));
  const auto pick = static_cast<std::size_t>((static_cast<unsigned __int128>(h) * burnable.size()) >> 64);
  const std::size_t i = burnable[pick];
  return Cell{static_cast<int>(i / static_cast<std::size_t>(stack.cols())),
              static_cast<int>(i % static_cast<std::size_t>(stack.cols()))};
}

BenchmarkTrace run_benchmark(const Scenario& scenario, Cell ignition) {
  if (!scenario.stack.contains(ignition)) throw OutOfRangeError("run_benchmark: ignition outside the grid");
  BenchmarkTrace trace;
  trace.ignition = ignition;
  FireState state(scenario.rows(), scenario.cols());
  if (scenario.burnable(ignition)) trace.ignited = ignite(state, ignition);

  auto record = [&] {
    const DamageCounts counts = damage_counts(state);
    trace.damaged_per_t.push_back(counts.burned + counts.burning);
    trace.burned_per_t.push_back(counts.burned);
    trace.frames.push_back(state.status);
  };
  record();
  while (is_active(state)) {
    if (state.t >= scenario.fire.step_cap) {
      throw StepCapExceeded("benchmark did not quiesce within " + std::to_string(scenario.fire.step_cap) + " steps");
    }
    step_fire(state, scenario.model);
    record();
  }
  trace.final_burned_map = state.status_grid();
  trace.total_timesteps = static_cast<std::int64_t>(trace.damaged_per_t.size());
  trace.total_burned = damage_counts(state).burned;
  return trace;
}

std::span<const float> Observation::channel(int k) const {
  if (k < 0 || k >= channels) throw OutOfRangeError("observation channel out of range");
  const std::size_t plane = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  return std::span<const float>(data).subspan(static_cast<std::size_t>(k) * plane, plane);
}

float Observation::at(int k, Cell c) const {
  if (c.row < 0 || c.col < 0 || c.row >= rows || c.col >= cols) throw OutOfRangeError("observation cell out of range");
  return channel(k)[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c.col)];
}

Observation encode_observation(const FireState& state, Cell agent, const BenchmarkTrace& trace,
                               const Scenario& scenario, const EpisodeConfig& config) {
  if (state.rows != scenario.rows() || state.cols != scenario.cols()) {
    throw DimensionError("encode_observation: fire state does not match the scenario grid");
  }
  Observation obs;
  obs.rows = state.rows;
  obs.cols = state.cols;
  obs.channels = 3 + static_cast<int>(config.attributes.size());
  const std::size_t plane = state.size();
  obs.data.assign(plane * static_cast<std::size_t>(obs.channels), 0.0f);

  const float status_scale = config.normalize ? 1.0f / static_cast<float>(kMaxStatusCode) : 1.0f;
  auto put_statuses = [&](int k, const std::vector<CellStatus>& statuses) {
    float* out = obs.data.data() + static_cast<std::size_t>(k) * plane;
    for (std::size_t i = 0; i < plane; ++i) out[i] = static_cast<float>(code(statuses[i])) * status_scale;
  };
  put_statuses(0, state.status);
  if (state.contains(agent)) obs.data[state.index(agent)] = static_cast<float>(kAgentCode) * status_scale;
  put_statuses(1, trace.frame_at(state.t));
  put_statuses(2, trace.frames.back());

  const LayerStack& stack = scenario.stack;
  for (std::size_t a = 0; a < config.attributes.size(); ++a) {
    const Attribute attr = config.attributes[a];
    const Range& range = scenario.bounds.of(attr);
    float* out = obs.data.data() + (3 + a) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      double v = 0.0;
      const FuelParams& p = stack.fuel_at(i).params;
      switch (attr) {
        case Attribute::w0: v = p.w0; break;
        case Attribute::sigma: v = p.sigma; break;
        case Attribute::delta: v = p.delta; break;
        case Attribute::mx: v = p.mx; break;
        case Attribute::elevation: v = stack.elevation()[i]; break;
        case Attribute::wind_speed:
        case Attribute::wind_direction: {
          const Cell c{static_cast<int>(i / static_cast<std::size_t>(obs.cols)),
                       static_cast<int>(i % static_cast<std::size_t>(obs.cols))};
          const WindSample w = scenario.wind.sample(state.t, c);
          v = attr == Attribute::wind_speed ? w.speed : w.direction;
          break;
        }
      }
      out[i] = config.normalize ? normalized(v, range) : static_cast<float>(v);
    }
  }
  return obs;
}

Environment::Environment(std::shared_ptr<const Scenario> scenario, EpisodeConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)) {
  if (!scenario_) throw EpisodeError("environment requires a scenario");
  config_.validate(scenario_->rows(), scenario_->cols());
}

Observation Environment::reset(std::uint64_t episode_seed) { return reset(episode_seed, nullptr); }

Observation Environment::reset(std::uint64_t episode_seed, std::shared_ptr<const BenchmarkTrace> trace) {
  const Cell ignition = choose_ignition(*scenario_, episode_seed);
  if (trace && trace->ignition != ignition) throw EpisodeError("reset: cached benchmark is for another ignition");
  if (!trace) trace = std::make_shared<const BenchmarkTrace>(run_benchmark(*scenario_, ignition));
  trace_ = std::move(trace);

  live_ = FireState(scenario_->rows(), scenario_->cols());
  if (scenario_->burnable(ignition)) ignite(live_, ignition);
  agent_ = config_.agent_start;
  agent_steps_ = 0;
  reward_sum_ = 0.0;
  bonus_sum_ = 0.0;
  bonus_count_ = 0;
  terminated_ = false;
  truncated_ = false;
  started_ = true;
  reset_info_ = ResetInfo{ignition, trace_->total_burned, trace_->total_burned == 0};
  last_ = snapshot(false);
  return observe_ ? observe() : Observation{};
}

DamageSnapshot Environment::snapshot(bool at_end) const {
  const DamageCounts live = damage_counts(live_);
  const auto last = static_cast<std::int64_t>(trace_->frames.size()) - 1;
  const std::int64_t bt = at_end ? last : std::min(live_.t, last);
  DamageSnapshot s;
  s.burned = live.burned;
  s.burning = live.burning;
  s.mitigated = live.mitigated;
  const auto k = static_cast<std::size_t>(bt);
  s.bench_burned = trace_->burned_per_t[k];
  s.bench_burning = trace_->damaged_per_t[k] - trace_->burned_per_t[k];
  return s;
}

StepResult Environment::step(Action action) {
  if (!started_) throw EpisodeError("step called before reset");
  if (done()) throw EpisodeError("step called after the episode ended");
  if (action.movement < 0 || action.movement >= static_cast<int>(config_.movements.size()) ||
      action.interaction < 0 || action.interaction >= static_cast<int>(config_.interactions.size())) {
    throw OutOfRangeError("step: action index outside the configured lists");
  }

  StepResult result;
  agent_ = moved(agent_, config_.movements[static_cast<std::size_t>(action.movement)], live_.rows, live_.cols);
  if (const auto kind = mitigation_of(config_.interactions[static_cast<std::size_t>(action.interaction)])) {
    if (apply_mitigation(live_, agent_, *kind)) {
      const double bonus = mitigation_bonus(static_cast<std::int64_t>(live_.size()));
      result.reward += bonus;
      bonus_sum_ += bonus;
      ++bonus_count_;
      result.info.bonus = true;
    }
  }
  ++agent_steps_;

  const bool advance = agent_steps_ % config_.agent_speed == 0 && is_active(live_);
  if (advance) {
    if (live_.t >= scenario_->fire.step_cap) {
      throw StepCapExceeded("live fire did not quiesce within " + std::to_string(scenario_->fire.step_cap) + " steps");
    }
    step_fire(live_, scenario_->model);
  }
  terminated_ = !is_active(live_);
  if (advance || terminated_) {
    const DamageSnapshot cur = snapshot(terminated_);
    result.reward += step_reward(last_, cur, reset_info_.total_endangered);
    last_ = cur;
  }
  truncated_ = !terminated_ && agent_steps_ >= config_.max_agent_steps;
  reward_sum_ += result.reward;

  result.terminated = terminated_;
  result.truncated = truncated_;
  result.info.agent_step = agent_steps_;
  result.info.t = live_.t;
  result.info.agent = agent_;
  result.info.action = action;
  result.info.fire_advanced = advance;
  result.info.damage = last_;
  if (observe_) result.observation = observe();
  return result;
}

Observation Environment::observe() const {
  if (!started_) throw EpisodeError("observe called before reset");
  return encode_observation(live_, agent_, *trace_, *scenario_, config_);
}

MetricSummary Environment::metrics() const {
  if (!started_) throw EpisodeError("metrics requested before reset");
  const DamageCounts live = damage_counts(live_);
  MetricSummary m;
  const std::int64_t sim_t = live_.t + 1;
  const std::int64_t bench_t = trace_->total_timesteps;
  m.area_saved = area_saved(live.burned, live.mitigated, trace_->total_burned);
  m.timesteps_saved = timesteps_saved(sim_t, bench_t);
  m.burn_rate_sim = burn_rate(live.burned, live.mitigated, sim_t);
  m.burn_rate_bench = burn_rate(trace_->total_burned, 0, bench_t);
  m.burn_rate_reduction = burn_rate_reduction(m.burn_rate_sim, m.burn_rate_bench);
  m.episode_reward_sum = reward_sum_;
  return m;
}

}  // namespace emberline
