#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "emberline/config.hpp"
#include "emberline/env.hpp"
#include "emberline/errors.hpp"

namespace emberline {

/// Error with the HTTP status it maps to.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& message, std::string key_path = {})
      : Error(message), status_(status), key_path_(std::move(key_path)) {}
  [[nodiscard]] int status() const noexcept { return status_; }
  [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }

 private:
  int status_;
  std::string key_path_;
};

[[nodiscard]] nlohmann::json status_legend();

class Session;

/// Cursor over one session's revisions. Each next() yields the delta for the
/// following revision, or one coalesced delta when the consumer has fallen
/// more than `max_backlog` revisions behind.
class Subscription {
 public:
  Subscription(std::shared_ptr<Session> session, std::int64_t cursor, std::int64_t max_backlog);
  /// nullopt on timeout or once the session is deleted (see closed()).
  std::optional<nlohmann::json> next(std::chrono::milliseconds timeout);
  [[nodiscard]] bool closed() const;
  [[nodiscard]] std::int64_t cursor() const noexcept { return cursor_; }

 private:
  std::shared_ptr<Session> session_;
  std::int64_t cursor_;
  std::int64_t max_backlog_;
};

/// One interactive what-if scenario: agent-free, mitigations posted directly,
/// fire advanced on demand. All methods are thread-safe; mutations are
/// serialized and each bumps the revision by one.
class Session {
 public:
  Session(std::string id, RunConfig config);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] nlohmann::json descriptor() const;
  [[nodiscard]] nlohmann::json state(std::optional<std::int64_t> since) const;
  nlohmann::json mitigate(Cell cell, std::string_view kind);
  nlohmann::json advance(std::int64_t steps);
  [[nodiscard]] nlohmann::json command_log() const;
  [[nodiscard]] std::int64_t revision() const;

  void close();
  [[nodiscard]] bool is_closed() const;
  void touch(std::chrono::steady_clock::time_point now);
  [[nodiscard]] std::chrono::steady_clock::time_point last_access() const;

 private:
  friend class Subscription;

  struct Change {
    std::int64_t revision;
    std::int32_t cell;
    std::uint8_t from;
    std::uint8_t to;
  };

  void record(const std::vector<CellStatus>& before);
  void persist_unlocked() const;
  [[nodiscard]] nlohmann::json delta_unlocked(std::int64_t from, std::int64_t to) const;
  [[nodiscard]] nlohmann::json counts_json(std::int64_t revision) const;
  [[nodiscard]] DamageSnapshot snapshot_unlocked() const;
  [[nodiscard]] double saved_proportion_unlocked() const;

  std::string id_;
  RunConfig config_;
  std::shared_ptr<const Scenario> scenario_;
  std::shared_ptr<const BenchmarkTrace> trace_;
  FireState live_;
  std::int64_t revision_ = 0;
  std::vector<Change> changes_;            // ordered by revision
  std::vector<DamageCounts> counts_;       // indexed by revision
  nlohmann::json commands_ = nlohmann::json::array();
  std::optional<std::filesystem::path> log_path_;
  bool closed_ = false;
  std::chrono::steady_clock::time_point last_access_;

  mutable std::shared_mutex mutex_;
  mutable std::condition_variable_any changed_;

  friend class SessionManager;
};

struct ServiceOptions {
  std::chrono::seconds idle_ttl{30 * 60};
  std::int64_t max_backlog = 64;
  std::int64_t max_advance = 100000;
  std::optional<std::filesystem::path> log_dir;  // per-session command logs
  RunConfig defaults;                            // base that session configs override
  std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});

  /// Body is a JSON (or YAML) config overriding `defaults`. 400 with the key
  /// path for invalid configs.
  nlohmann::json create(std::string_view config_text);
  nlohmann::json state(const std::string& id, std::optional<std::int64_t> since);
  nlohmann::json mitigate(const std::string& id, const nlohmann::json& body);
  nlohmann::json advance(const std::string& id, const nlohmann::json& body);
  nlohmann::json command_log(const std::string& id);
  /// Creates a session from a command log and replays it.
  nlohmann::json replay(const nlohmann::json& log);
  void remove(const std::string& id);
  [[nodiscard]] std::unique_ptr<Subscription> subscribe(const std::string& id, std::optional<std::int64_t> since);
  /// Drops sessions idle longer than the TTL; returns how many.
  std::size_t sweep();
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] const ServiceOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<Session> create_session(const RunConfig& config);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 0;
  std::uint64_t id_salt_;
};

}  // namespace emberline
