#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emberline/env.hpp"
#include "emberline/fire.hpp"
#include "emberline/scenario.hpp"
#include "emberline/strategy.hpp"
#include "emberline/terrain.hpp"
#include "emberline/wind.hpp"

namespace emberline {

enum class TerrainSource : std::uint8_t { procedural, files };

struct TerrainConfig {
  TerrainSource source = TerrainSource::procedural;
  std::string bundle;  // directory with fuel.grid, elevation.grid, meta.yaml
  int rows = 64;
  int cols = 64;
  double cell_size = kDefaultCellSize;
  std::optional<GeoOrigin> origin;
  int octaves = 4;
  double persistence = 0.5;
  double frequency = 4.0;
  double elevation_min = 0.0;
  double elevation_max = 500.0;
  std::vector<int> fuel_ids{1, 2, 3};
  double fuel_frequency = 3.0;
  double nonburnable_fraction = 0.0;
  friend bool operator==(const TerrainConfig&, const TerrainConfig&) = default;
};

struct WindConfig {
  WindMode mode = WindMode::constant;
  double speed = 5.0;       // mph; base speed for generated and fluid modes
  double direction = 90.0;  // degrees clockwise from north, direction of travel
  int steps = 256;          // frames for generated and fluid modes
  double variation = 2.0;
  double direction_spread = 30.0;
  double frequency = 3.0;
  double drift = 0.05;
  double viscosity = 0.01;
  double forcing = 0.0;
  int vortices = 4;
  double solver_dt = 0.1;
  PressureSolver pressure_solver = PressureSolver::conjugate_gradient;
  int pressure_iterations = 20;
  int diffusion_iterations = 20;
  friend bool operator==(const WindConfig&, const WindConfig&) = default;
};

struct ScenarioConfig {
  TerrainConfig terrain;
  WindConfig wind;
  FireConfig fire;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

enum class PolicyKind : std::uint8_t { noop, random, line, plan };

struct LineConfig {
  LineAxis axis = LineAxis::row;
  int index = -1;  // -1: the agent's starting row (or column)
  Movement direction = Movement::right;
  friend bool operator==(const LineConfig&, const LineConfig&) = default;
};

struct StrategyConfig {
  PolicyKind policy = PolicyKind::noop;
  int episodes = 8;
  LineConfig line;
  std::string plan;  // plan JSON path for the plan policy
  std::int64_t budget = 64;
  CemParams optimizer;
  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

struct OutputConfig {
  std::string dir = "out";
  int frames_every = 0;  // 0 disables frame export
  bool log = true;       // write episode.jsonl from simulate
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  std::uint64_t seed = 0;
  ScenarioConfig scenario;
  EpisodeConfig environment;
  StrategyConfig strategy;
  OutputConfig output;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

[[nodiscard]] std::string_view policy_name(PolicyKind p) noexcept;

/// Merges the files in order (later keys win, maps merge recursively) and
/// validates the result. A file may list lower-priority files under
/// `include:`, resolved relative to itself. Relative data paths are resolved
/// against the file that sets them. Errors are ConfigError with a key path.
[[nodiscard]] RunConfig load_config(const std::vector<std::filesystem::path>& paths);
/// Parses one YAML or JSON document over the defaults.
[[nodiscard]] RunConfig parse_config(std::string_view text);
/// Parses one document merged over `base`.
[[nodiscard]] RunConfig parse_config(std::string_view text, const RunConfig& base);
/// Every field, defaults included; parse_config(dump_config(c)) == c.
[[nodiscard]] std::string dump_config(const RunConfig& config);
[[nodiscard]] nlohmann::json config_to_json(const RunConfig& config);

/// Throws ConfigError naming the first invalid key.
void validate(const RunConfig& config);

[[nodiscard]] std::shared_ptr<const Scenario> build_scenario(const RunConfig& config);
/// Policy for the configured strategy; loads the plan file for `plan`.
[[nodiscard]] PolicyFactory make_policy(const RunConfig& config);

}  // namespace emberline
