#include "emberline/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "emberline/episode_log.hpp"
#include "emberline/errors.hpp"
#include "emberline/seeding.hpp"

namespace emberline {

namespace {

int require_movement(const EpisodeConfig& config, Movement m, std::string_view who) {
  const auto i = movement_index(config, m);
  if (!i) {
    throw ConfigError("environment.movements",
                      std::string(who) + " needs movement '" + std::string(movement_name(m)) + "'");
  }
  return *i;
}

int require_interaction(const EpisodeConfig& config, Interaction x, std::string_view who) {
  const auto i = interaction_index(config, x);
  if (!i) {
    throw ConfigError("environment.interactions",
                      std::string(who) + " needs interaction '" + std::string(interaction_name(x)) + "'");
  }
  return *i;
}

Movement step_toward(Cell from, Cell to) noexcept {
  if (to.row < from.row) return Movement::up;
  if (to.row > from.row) return Movement::down;
  if (to.col < from.col) return Movement::left;
  if (to.col > from.col) return Movement::right;
  return Movement::nothing;
}

nlohmann::json cell_json(Cell c) { return nlohmann::json::array({c.row, c.col}); }

nlohmann::json stat_json(const Stat& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

void NoopPolicy::begin_episode(const EpisodeConfig& config, int, int) {
  action_ = Action{require_movement(config, Movement::nothing, "noop policy"),
                   require_interaction(config, Interaction::nothing, "noop policy")};
}

Action NoopPolicy::act(const Observation&, std::int64_t, Cell) { return action_; }

void RandomPolicy::begin_episode(const EpisodeConfig& config, int, int) { config_ = config; }

Action RandomPolicy::act(const Observation&, std::int64_t step, Cell) {
  const std::size_t n = action_count(config_);
  const auto flat = static_cast<std::size_t>(unit_hash(seed_, static_cast<std::uint64_t>(step)) * static_cast<double>(n));
  return decode_action(config_, std::min(flat, n - 1));
}

ScriptedLinePolicy::ScriptedLinePolicy(LineAxis axis, int index, Movement direction)
    : axis_(axis), index_(index), direction_(direction) {
  const bool horizontal = direction == Movement::left || direction == Movement::right;
  const bool vertical = direction == Movement::up || direction == Movement::down;
  if ((axis == LineAxis::row && !horizontal) || (axis == LineAxis::col && !vertical)) {
    throw ConfigError("strategy.line.direction", "direction must run along the line");
  }
}

void ScriptedLinePolicy::begin_episode(const EpisodeConfig& config, int rows, int cols) {
  const int limit = axis_ == LineAxis::row ? rows : cols;
  if (index_ < 0 || index_ >= limit) throw ConfigError("strategy.line.index", "line index outside the grid");
  rows_ = rows;
  cols_ = cols;
  laying_ = false;
  finished_ = false;
  nothing_ = require_movement(config, Movement::nothing, "line policy");
  fireline_ = require_interaction(config, Interaction::fireline, "line policy");
  none_ = require_interaction(config, Interaction::nothing, "line policy");
  move_.assign(5, -1);
  for (Movement m : {Movement::nothing, Movement::up, Movement::down, Movement::left, Movement::right}) {
    if (auto i = movement_index(config, m)) move_[static_cast<std::size_t>(m)] = *i;
  }
  if (move_[static_cast<std::size_t>(direction_)] < 0) require_movement(config, direction_, "line policy");
}

Action ScriptedLinePolicy::act(const Observation&, std::int64_t, Cell agent) {
  auto with = [&](Movement m, int interaction) { return Action{move_[static_cast<std::size_t>(m)], interaction}; };
  if (finished_) return Action{nothing_, none_};
  if (!laying_) {
    const int pos = axis_ == LineAxis::row ? agent.row : agent.col;
    if (pos != index_) {
      Movement m;
      if (axis_ == LineAxis::row) m = pos < index_ ? Movement::down : Movement::up;
      else m = pos < index_ ? Movement::right : Movement::left;
      if (move_[static_cast<std::size_t>(m)] < 0) {
        throw ConfigError("environment.movements",
                          "line policy needs movement '" + std::string(movement_name(m)) + "'");
      }
      return with(m, none_);
    }
    laying_ = true;
    return Action{nothing_, fireline_};
  }
  bool at_edge = false;
  switch (direction_) {
    case Movement::right: at_edge = agent.col >= cols_ - 1; break;
    case Movement::left: at_edge = agent.col <= 0; break;
    case Movement::down: at_edge = agent.row >= rows_ - 1; break;
    case Movement::up: at_edge = agent.row <= 0; break;
    case Movement::nothing: at_edge = true; break;
  }
  if (at_edge) {
    finished_ = true;
    return Action{nothing_, none_};
  }
  return with(direction_, fireline_);
}

std::vector<Cell> rasterize_line(Cell a, Cell b) {
  const int dx = b.col - a.col;
  const int dy = b.row - a.row;
  const int nx = std::abs(dx);
  const int ny = std::abs(dy);
  const int sx = dx > 0 ? 1 : -1;
  const int sy = dy > 0 ? 1 : -1;
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(nx + ny + 1));
  Cell p = a;
  out.push_back(p);
  for (int ix = 0, iy = 0; ix < nx || iy < ny;) {
    if (static_cast<long long>(1 + 2 * ix) * ny < static_cast<long long>(1 + 2 * iy) * nx) {
      p.col += sx;
      ++ix;
    } else {
      p.row += sy;
      ++iy;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Cell> FirelinePlan::cells() const {
  std::vector<Cell> out;
  std::set<Cell> seen;
  for (const auto& [a, b] : segments) {
    for (Cell c : rasterize_line(a, b)) {
      if (seen.insert(c).second) out.push_back(c);
    }
  }
  return out;
}

std::string plan_to_json(const FirelinePlan& plan) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& [a, b] : plan.segments) segments.push_back({cell_json(a), cell_json(b)});
  return nlohmann::json{{"segments", segments}}.dump();
}

FirelinePlan plan_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("plan", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("segments") || !doc["segments"].is_array()) {
    throw ConfigError("plan.segments", "expected an object with a 'segments' array");
  }
  auto to_cell = [](const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
      throw ConfigError(where, "expected [row, col] integers");
    }
    return Cell{j[0].get<int>(), j[1].get<int>()};
  };
  FirelinePlan plan;
  const auto& segs = doc["segments"];
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string where = "plan.segments[" + std::to_string(i) + "]";
    if (!segs[i].is_array() || segs[i].size() != 2) throw ConfigError(where, "expected [[r0,c0],[r1,c1]]");
    plan.segments.emplace_back(to_cell(segs[i][0], where), to_cell(segs[i][1], where));
  }
  return plan;
}

void validate_plan(const FirelinePlan& plan, int rows, int cols, std::int64_t budget) {
  auto inside = [&](Cell c) { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; };
  for (const auto& [a, b] : plan.segments) {
    if (!inside(a) || !inside(b)) throw OutOfRangeError("fireline plan endpoint outside the grid");
  }
  if (budget >= 0 && static_cast<std::int64_t>(plan.length()) > budget) {
    throw std::invalid_argument("fireline plan of " + std::to_string(plan.length()) + " cells exceeds budget " +
                                std::to_string(budget));
  }
}

void PlanPolicy::begin_episode(const EpisodeConfig& config, int rows, int cols) {
  validate_plan(plan_, rows, cols);
  const int nothing = require_movement(config, Movement::nothing, "plan policy");
  const int none = require_interaction(config, Interaction::nothing, "plan policy");
  const int fireline = require_interaction(config, Interaction::fireline, "plan policy");
  idle_ = Action{nothing, none};
  script_.clear();
  auto move = [&](Movement m) { return require_movement(config, m, "plan policy"); };

  Cell pos = config.agent_start;
  for (const auto& [a, b] : plan_.segments) {
    while (pos != a) {
      const Movement m = step_toward(pos, a);
      script_.push_back(Action{move(m), none});
      pos = m == Movement::up ? Cell{pos.row - 1, pos.col}
          : m == Movement::down ? Cell{pos.row + 1, pos.col}
          : m == Movement::left ? Cell{pos.row, pos.col - 1}
                                : Cell{pos.row, pos.col + 1};
    }
    const std::vector<Cell> line = rasterize_line(a, b);
    script_.push_back(Action{nothing, fireline});
    for (std::size_t k = 1; k < line.size(); ++k) {
      script_.push_back(Action{move(step_toward(line[k - 1], line[k])), fireline});
    }
    pos = b;
  }
}

Action PlanPolicy::act(const Observation&, std::int64_t step, Cell) {
  if (step >= 0 && static_cast<std::size_t>(step) < script_.size()) return script_[static_cast<std::size_t>(step)];
  return idle_;
}

PolicyFactory noop_policy() {
  return [](std::uint64_t) { return std::make_unique<NoopPolicy>(); };
}

PolicyFactory random_policy() {
  return [](std::uint64_t seed) { return std::make_unique<RandomPolicy>(seed); };
}

PolicyFactory scripted_line_policy(LineAxis axis, int index, Movement direction) {
  ScriptedLinePolicy probe(axis, index, direction);  // validates eagerly
  (void)probe;
  return [=](std::uint64_t) { return std::make_unique<ScriptedLinePolicy>(axis, index, direction); };
}

PolicyFactory plan_policy(FirelinePlan plan) {
  return [plan = std::move(plan)](std::uint64_t) { return std::make_unique<PlanPolicy>(plan); };
}

std::shared_ptr<const BenchmarkTrace> BenchmarkCache::get(Cell ignition) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = traces_.find(ignition); it != traces_.end()) return it->second;
  }
  auto trace = std::make_shared<const BenchmarkTrace>(run_benchmark(*scenario_, ignition));
  std::lock_guard lock(mutex_);
  return traces_.emplace(ignition, std::move(trace)).first->second;
}

EpisodeResult run_episode(Environment& env, Policy& policy, std::uint64_t episode_seed,
                          std::shared_ptr<const BenchmarkTrace> trace, EpisodeLog* log) {
  env.set_observe(policy.needs_observation());
  Observation obs = env.reset(episode_seed, std::move(trace));
  policy.begin_episode(env.config(), env.scenario().rows(), env.scenario().cols());
  if (log) log->begin(env, episode_seed);
  while (!env.done()) {
    StepResult r = env.step(policy.act(obs, env.agent_steps(), env.agent()));
    if (log) log->step(env, r);
    obs = std::move(r.observation);
  }
  if (log) log->end(env);

  EpisodeResult out;
  out.episode_seed = episode_seed;
  out.ignition = env.reset_info().ignition;
  out.metrics = env.metrics();
  out.agent_steps = env.agent_steps();
  out.fire_steps = env.fire().t;
  out.terminated = env.terminated();
  out.truncated = env.truncated();
  out.degenerate = env.reset_info().degenerate;
  out.bonus_sum = env.bonus_sum();
  return out;
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = std::clamp(sum / static_cast<double>(values.size()), s.min, s.max);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

void EvalReport::aggregate() {
  std::vector<double> reward, area, steps, rate;
  for (const EpisodeResult& e : episodes) {
    reward.push_back(e.metrics.episode_reward_sum);
    area.push_back(e.metrics.area_saved);
    steps.push_back(e.metrics.timesteps_saved);
    rate.push_back(e.metrics.burn_rate_reduction);
  }
  reward_sum = summarize(reward);
  area_saved = summarize(area);
  timesteps_saved = summarize(steps);
  burn_rate_reduction = summarize(rate);
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json episodes = nlohmann::json::array();
  for (const EpisodeResult& e : report.episodes) {
    episodes.push_back({{"episode_seed", e.episode_seed},
                        {"ignition", cell_json(e.ignition)},
                        {"agent_steps", e.agent_steps},
                        {"fire_steps", e.fire_steps},
                        {"terminated", e.terminated},
                        {"truncated", e.truncated},
                        {"degenerate", e.degenerate},
                        {"bonus_sum", e.bonus_sum},
                        {"metrics", metrics_json(e.metrics)}});
  }
  nlohmann::json doc{{"episodes", episodes},
                     {"summary",
                      {{"episode_reward_sum", stat_json(report.reward_sum)},
                       {"area_saved", stat_json(report.area_saved)},
                       {"timesteps_saved", stat_json(report.timesteps_saved)},
                       {"burn_rate_reduction", stat_json(report.burn_rate_reduction)}}}};
  return doc;
}

std::string report_to_json(const EvalReport& report, int indent) { return report_json(report).dump(indent); }

EvalReport evaluate_policy(const PolicyFactory& factory, std::shared_ptr<const Scenario> scenario,
                           const EpisodeConfig& config, int n_episodes, std::uint64_t root_seed,
                           BenchmarkCache* cache) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate_policy: n_episodes must be >= 1");
  if (!scenario) throw std::invalid_argument("evaluate_policy: null scenario");
  config.validate(scenario->rows(), scenario->cols());
  std::unique_ptr<BenchmarkCache> own_cache;
  if (!cache || cache->scenario() != scenario) {
    own_cache = std::make_unique<BenchmarkCache>(scenario);
    cache = own_cache.get();
  }

  const auto n = static_cast<std::size_t>(n_episodes);
  std::vector<std::uint64_t> seeds(n);
  std::vector<Cell> ignitions(n);
  for (std::size_t i = 0; i < n; ++i) {
    seeds[i] = derive_seed(root_seed, "episode", i);
    ignitions[i] = choose_ignition(*scenario, seeds[i]);
  }

  // An open-loop policy replays the same actions on the same fire, so
  // episodes sharing an ignition are identical and run once.
  const bool open_loop = factory(derive_seed(root_seed, "policy", 0))->open_loop();
  std::vector<std::size_t> source(n);
  std::vector<std::size_t> jobs;
  for (std::size_t i = 0; i < n; ++i) {
    source[i] = i;
    if (open_loop) {
      for (std::size_t j = 0; j < i; ++j) {
        if (ignitions[j] == ignitions[i]) {
          source[i] = source[j];
          break;
        }
      }
    }
    if (source[i] == i) jobs.push_back(i);
  }

  std::vector<EpisodeResult> results(n);
  std::vector<std::exception_ptr> errors(jobs.size());
  const auto njobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < njobs; ++k) {
    const std::size_t i = jobs[static_cast<std::size_t>(k)];
    try {
      Environment env(scenario, config);
      auto policy = factory(derive_seed(root_seed, "policy", i));
      results[i] = run_episode(env, *policy, seeds[i], cache->get(ignitions[i]));
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport report;
  report.episodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.episodes[i] = results[source[i]];
    report.episodes[i].episode_seed = seeds[i];
  }
  report.aggregate();
  return report;
}

}  // namespace emberline
