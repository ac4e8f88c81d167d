#pragma once

#include <cstdint>
#include <iosfwd>

#include <json.hpp>

#include "emberline/env.hpp"
#include "emberline/reward.hpp"

namespace emberline {

[[nodiscard]] nlohmann::json metrics_json(const MetricSummary& m);
[[nodiscard]] nlohmann::json damage_json(const DamageSnapshot& d);

/// JSON-lines episode record: one header, one line per step, one summary.
class EpisodeLog {
 public:
  explicit EpisodeLog(std::ostream& out) : out_(out) {}

  void begin(const Environment& env, std::uint64_t episode_seed);
  void step(const Environment& env, const StepResult& result);
  void end(const Environment& env);

 private:
  void write(const nlohmann::json& record);
  std::ostream& out_;
};

}  // namespace emberline
