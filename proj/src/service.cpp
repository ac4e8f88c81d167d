#include "emberline/service.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include "emberline/seeding.hpp"

namespace emberline {

namespace {

using nlohmann::json;

json snapshot_json(const DamageSnapshot& s) {
  return {{"burned", s.burned},
          {"burning", s.burning},
          {"mitigated", s.mitigated},
          {"bench_burned", s.bench_burned},
          {"bench_burning", s.bench_burning}};
}

// Maps library errors onto HTTP statuses.
template <class F>
auto translate(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ServiceError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ServiceError(400, e.what(), e.key_path());
  } catch (const StepCapExceeded& e) {
    throw ServiceError(422, e.what());
  } catch (const Error& e) {
    throw ServiceError(400, e.what());
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, e.what());
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("malformed request: ") + e.what());
  }
}

}  // namespace

json status_legend() {
  return {{"0", "unburned"}, {"1", "burning"},     {"2", "burned"}, {"3", "fireline"},
          {"4", "scratchline"}, {"5", "wetline"}, {"6", "agent"}};
}

Session::Session(std::string id, RunConfig config) : id_(std::move(id)), config_(std::move(config)) {
  scenario_ = build_scenario(config_);
  const Cell ignition = choose_ignition(*scenario_, derive_seed(config_.seed, "episode", 0));
  trace_ = std::make_shared<const BenchmarkTrace>(run_benchmark(*scenario_, ignition));
  live_ = FireState(scenario_->rows(), scenario_->cols());
  if (scenario_->burnable(ignition)) ignite(live_, ignition);
  counts_.push_back(damage_counts(live_));
}

json Session::descriptor() const {
  std::shared_lock lock(mutex_);
  return {{"id", id_},
          {"rows", live_.rows},
          {"cols", live_.cols},
          {"cell_size", scenario_->stack.cell_size()},
          {"legend", status_legend()},
          {"ignition", json::array({trace_->ignition.row, trace_->ignition.col})},
          {"revision", revision_},
          {"benchmark",
           {{"total_burned", trace_->total_burned},
            {"total_timesteps", trace_->total_timesteps},
            {"damaged_per_t", trace_->damaged_per_t}}},
          {"counts", counts_json(revision_)}};
}

json Session::counts_json(std::int64_t revision) const {
  const DamageCounts& c = counts_[static_cast<std::size_t>(revision)];
  const auto total = static_cast<std::int64_t>(live_.size());
  return {{"unburned", total - c.burned - c.burning - c.mitigated},
          {"burning", c.burning},
          {"burned", c.burned},
          {"mitigated", c.mitigated}};
}

DamageSnapshot Session::snapshot_unlocked() const {
  const DamageCounts c = damage_counts(live_);
  const auto last = static_cast<std::int64_t>(trace_->frames.size()) - 1;
  const std::int64_t bt = is_active(live_) ? std::min(live_.t, last) : last;
  const auto k = static_cast<std::size_t>(bt);
  return DamageSnapshot{c.burned, c.burning, c.mitigated, trace_->burned_per_t[k],
                        trace_->damaged_per_t[k] - trace_->burned_per_t[k]};
}

double Session::saved_proportion_unlocked() const {
  // Sum of per-step rewards since ignition; it telescopes to this difference.
  const DamageSnapshot s = snapshot_unlocked();
  const DamageSnapshot start{0, trace_->ignited ? 1 : 0, 0, 0, trace_->damaged_per_t.front()};
  return step_reward(start, s, trace_->total_burned);
}

json Session::delta_unlocked(std::int64_t from, std::int64_t to) const {
  const auto first = std::upper_bound(changes_.begin(), changes_.end(), from,
                                      [](std::int64_t r, const Change& c) { return r < c.revision; });
  std::map<std::int32_t, std::pair<std::uint8_t, std::uint8_t>> net;
  for (auto it = first; it != changes_.end() && it->revision <= to; ++it) {
    auto [pos, inserted] = net.try_emplace(it->cell, it->from, it->to);
    if (!inserted) pos->second.second = it->to;
  }
  json changed = json::array();
  for (const auto& [cell, codes] : net) {
    if (codes.first == codes.second) continue;
    changed.push_back({cell / live_.cols, cell % live_.cols, codes.second});
  }
  return {{"revision", to}, {"since", from}, {"changed", std::move(changed)}, {"counts", counts_json(to)}};
}

json Session::state(std::optional<std::int64_t> since) const {
  std::shared_lock lock(mutex_);
  json out;
  if (!since) {
    json grid = json::array();
    for (int r = 0; r < live_.rows; ++r) {
      json row = json::array();
      for (int c = 0; c < live_.cols; ++c) row.push_back(code(live_.at(Cell{r, c})));
      grid.push_back(std::move(row));
    }
    out = {{"revision", revision_}, {"full", true}, {"rows", live_.rows}, {"cols", live_.cols},
           {"grid", std::move(grid)}, {"counts", counts_json(revision_)}};
  } else {
    if (*since < 0) throw ServiceError(400, "since must be >= 0");
    if (*since > revision_) {
      throw ServiceError(400, "revision " + std::to_string(*since) + " is in the future (current " +
                                  std::to_string(revision_) + ")");
    }
    out = delta_unlocked(*since, revision_);
    out["full"] = false;
  }
  out["t"] = live_.t;
  out["quiescent"] = !is_active(live_);
  out["saved_proportion"] = saved_proportion_unlocked();
  return out;
}

void Session::record(const std::vector<CellStatus>& before) {
  ++revision_;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] != live_.status[i]) {
      changes_.push_back(Change{revision_, static_cast<std::int32_t>(i), code(before[i]), code(live_.status[i])});
    }
  }
  counts_.push_back(damage_counts(live_));
}

void Session::persist_unlocked() const {
  if (!log_path_) return;
  std::ofstream out(*log_path_, std::ios::trunc);
  out << json{{"config", config_to_json(config_)}, {"commands", commands_}}.dump(2) << '\n';
}

json Session::mitigate(Cell cell, std::string_view kind_name) {
  MitigationKind kind;
  try {
    kind = parse_mitigation(kind_name);
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, e.what(), "kind");
  }
  json out;
  {
    std::unique_lock lock(mutex_);
    if (closed_) throw ServiceError(404, "session deleted");
    if (!live_.contains(cell)) {
      throw ServiceError(400, "cell [" + std::to_string(cell.row) + ", " + std::to_string(cell.col) +
                                  "] outside the " + std::to_string(live_.rows) + "x" + std::to_string(live_.cols) +
                                  " grid",
                         "cell");
    }
    const std::vector<CellStatus> before = live_.status;
    const bool applied = apply_mitigation(live_, cell, kind);
    record(before);
    commands_.push_back({{"op", "mitigate"}, {"cell", {cell.row, cell.col}}, {"kind", mitigation_name(kind)}});
    persist_unlocked();
    out = delta_unlocked(revision_ - 1, revision_);
    out["applied"] = applied;
    out["t"] = live_.t;
    out["saved_proportion"] = saved_proportion_unlocked();
  }
  changed_.notify_all();
  return out;
}

json Session::advance(std::int64_t steps) {
  if (steps < 1) throw ServiceError(400, "steps must be >= 1", "steps");
  json out;
  {
    std::unique_lock lock(mutex_);
    if (closed_) throw ServiceError(404, "session deleted");
    const std::vector<CellStatus> before = live_.status;
    json per_step = json::array();
    for (std::int64_t k = 0; k < steps && is_active(live_); ++k) {
      if (live_.t >= scenario_->fire.step_cap) throw ServiceError(422, "fire exceeded the step cap");
      step_fire(live_, scenario_->model);
      json snap = snapshot_json(snapshot_unlocked());
      snap["t"] = live_.t;
      per_step.push_back(std::move(snap));
    }
    record(before);
    commands_.push_back({{"op", "advance"}, {"steps", steps}});
    persist_unlocked();
    out = delta_unlocked(revision_ - 1, revision_);
    out["t"] = live_.t;
    out["steps"] = std::move(per_step);
    out["quiescent"] = !is_active(live_);
    out["saved_proportion"] = saved_proportion_unlocked();
  }
  changed_.notify_all();
  return out;
}

json Session::command_log() const {
  std::shared_lock lock(mutex_);
  return {{"config", config_to_json(config_)}, {"commands", commands_}};
}

std::int64_t Session::revision() const {
  std::shared_lock lock(mutex_);
  return revision_;
}

void Session::close() {
  {
    std::unique_lock lock(mutex_);
    closed_ = true;
  }
  changed_.notify_all();
}

bool Session::is_closed() const {
  std::shared_lock lock(mutex_);
  return closed_;
}

void Session::touch(std::chrono::steady_clock::time_point now) {
  std::unique_lock lock(mutex_);
  last_access_ = now;
}

std::chrono::steady_clock::time_point Session::last_access() const {
  std::shared_lock lock(mutex_);
  return last_access_;
}

Subscription::Subscription(std::shared_ptr<Session> session, std::int64_t cursor, std::int64_t max_backlog)
    : session_(std::move(session)), cursor_(cursor), max_backlog_(std::max<std::int64_t>(1, max_backlog)) {}

std::optional<json> Subscription::next(std::chrono::milliseconds timeout) {
  std::shared_lock lock(session_->mutex_);
  session_->changed_.wait_for(lock, timeout, [&] { return session_->closed_ || session_->revision_ > cursor_; });
  if (session_->closed_ || session_->revision_ <= cursor_) return std::nullopt;
  const std::int64_t target = session_->revision_ - cursor_ > max_backlog_ ? session_->revision_ : cursor_ + 1;
  json msg = session_->delta_unlocked(cursor_, target);
  cursor_ = target;
  return msg;
}

bool Subscription::closed() const { return session_->is_closed(); }

SessionManager::SessionManager(ServiceOptions options) : options_(std::move(options)) {
  std::random_device rd;
  id_salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  if (options_.log_dir) std::filesystem::create_directories(*options_.log_dir);
}

std::shared_ptr<Session> SessionManager::create_session(const RunConfig& config) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(id_salt_ + ++next_id_)));
    id = buf;
  }
  auto session = translate([&] { return std::make_shared<Session>(id, config); });
  session->last_access_ = options_.clock();
  if (options_.log_dir) {
    session->log_path_ = *options_.log_dir / (id + ".json");
    session->persist_unlocked();
  }
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, session);
  return session;
}

json SessionManager::create(std::string_view config_text) {
  sweep();
  const RunConfig config = translate([&] { return parse_config(config_text, options_.defaults); });
  return create_session(config)->descriptor();
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
    s = it->second;
  }
  s->touch(options_.clock());
  return s;
}

json SessionManager::state(const std::string& id, std::optional<std::int64_t> since) { return find(id)->state(since); }

json SessionManager::mitigate(const std::string& id, const json& body) {
  auto s = find(id);
  return translate([&] {
    if (!body.is_object() || !body.contains("cell") || !body.contains("kind")) {
      throw ServiceError(400, "expected {\"cell\": [r, c], \"kind\": \"fireline\"}");
    }
    const json& cell = body["cell"];
    if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() || !cell[1].is_number_integer()) {
      throw ServiceError(400, "cell must be [row, col] integers", "cell");
    }
    if (!body["kind"].is_string()) throw ServiceError(400, "kind must be a string", "kind");
    return s->mitigate(Cell{cell[0].get<int>(), cell[1].get<int>()}, body["kind"].get<std::string>());
  });
}

json SessionManager::advance(const std::string& id, const json& body) {
  auto s = find(id);
  return translate([&] {
    if (!body.is_object() || !body.contains("steps") || !body["steps"].is_number_integer()) {
      throw ServiceError(400, "expected {\"steps\": N}", "steps");
    }
    const auto steps = body["steps"].get<std::int64_t>();
    if (steps > options_.max_advance) {
      throw ServiceError(400, "steps must be <= " + std::to_string(options_.max_advance), "steps");
    }
    return s->advance(steps);
  });
}

json SessionManager::command_log(const std::string& id) { return find(id)->command_log(); }

json SessionManager::replay(const json& log) {
  if (!log.is_object() || !log.contains("config") || !log.contains("commands") || !log["commands"].is_array()) {
    throw ServiceError(400, "expected a command log with 'config' and 'commands'");
  }
  const RunConfig config = translate([&] { return parse_config(log["config"].dump(), options_.defaults); });
  auto s = create_session(config);
  translate([&] {
    for (const json& cmd : log["commands"]) {
      const std::string op = cmd.at("op").get<std::string>();
      if (op == "mitigate") {
        s->mitigate(Cell{cmd.at("cell").at(0).get<int>(), cmd.at("cell").at(1).get<int>()},
                    cmd.at("kind").get<std::string>());
      } else if (op == "advance") {
        s->advance(cmd.at("steps").get<std::int64_t>());
      } else {
        throw ServiceError(400, "unknown command '" + op + "'");
      }
    }
    return 0;
  });
  return {{"session", s->descriptor()}, {"state", s->state(std::nullopt)}};
}

void SessionManager::remove(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
    s = it->second;
    sessions_.erase(it);
  }
  s->close();
}

std::unique_ptr<Subscription> SessionManager::subscribe(const std::string& id, std::optional<std::int64_t> since) {
  auto s = find(id);
  const std::int64_t current = s->revision();
  const std::int64_t cursor = since.value_or(current);
  if (cursor < 0 || cursor > current) throw ServiceError(400, "invalid stream cursor", "since");
  return std::make_unique<Subscription>(s, cursor, options_.max_backlog);
}

std::size_t SessionManager::sweep() {
  const auto now = options_.clock();
  std::vector<std::shared_ptr<Session>> expired;
  {
    std::lock_guard lock(mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (now - it->second->last_access() > options_.idle_ttl) {
        expired.push_back(it->second);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& s : expired) s->close();
  return expired.size();
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace emberline
