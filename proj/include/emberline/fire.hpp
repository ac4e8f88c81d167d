#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "emberline/grid.hpp"
#include "emberline/terrain.hpp"
#include "emberline/wind.hpp"

namespace emberline {

/// Status codes double as the export/wire encoding.
enum class CellStatus : std::uint8_t {
  unburned = 0,
  burning = 1,
  burned = 2,
  fireline = 3,
  scratchline = 4,
  wetline = 5,
};

/// Reserved observation code for the agent's cell.
inline constexpr std::uint8_t kAgentCode = 6;
inline constexpr std::uint8_t kMaxStatusCode = kAgentCode;

[[nodiscard]] constexpr std::uint8_t code(CellStatus s) noexcept { return static_cast<std::uint8_t>(s); }
[[nodiscard]] std::string_view status_name(CellStatus s) noexcept;

[[nodiscard]] constexpr bool is_mitigation(CellStatus s) noexcept {
  return s == CellStatus::fireline || s == CellStatus::scratchline || s == CellStatus::wetline;
}
/// Cells fire may enter: unburned ground and the two partial mitigations.
[[nodiscard]] constexpr bool is_ignitable(CellStatus s) noexcept {
  return s == CellStatus::unburned || s == CellStatus::scratchline || s == CellStatus::wetline;
}

enum class MitigationKind : std::uint8_t { fireline, scratchline, wetline };

[[nodiscard]] constexpr CellStatus status_of(MitigationKind k) noexcept {
  switch (k) {
    case MitigationKind::fireline: return CellStatus::fireline;
    case MitigationKind::scratchline: return CellStatus::scratchline;
    case MitigationKind::wetline: return CellStatus::wetline;
  }
  return CellStatus::fireline;
}
[[nodiscard]] std::string_view mitigation_name(MitigationKind k) noexcept;
/// Throws std::invalid_argument listing the allowed kinds.
[[nodiscard]] MitigationKind parse_mitigation(std::string_view name);

/// Multipliers on spread rate into a mitigated cell. Firelines are fixed at 0.
struct MitigationMultipliers {
  double scratchline = 0.4;
  double wetline = 0.25;
  friend bool operator==(const MitigationMultipliers&, const MitigationMultipliers&) = default;
};

struct FireConfig {
  double dt = 1.0;                 // minutes of fire time per step
  double attenuation = 1.0;        // global spread-rate multiplier
  MitigationMultipliers mitigation;
  int max_fire_duration = 30;      // steps a cell burns before it is Burned
  double dead_fuel_moisture = 0.03;
  std::optional<Cell> ignition;    // nullopt: random burnable cell per episode
  std::int64_t step_cap = 100000;  // rollouts that outlive this are rejected

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  friend bool operator==(const FireConfig&, const FireConfig&) = default;
};

// Neighbour order N, NE, E, SE, S, SW, W, NW (direction of travel).
inline constexpr int kNeighbors = 8;
inline constexpr std::array<int, kNeighbors> kNeighborRow{-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr std::array<int, kNeighbors> kNeighborCol{0, 1, 1, 1, 0, -1, -1, -1};
inline constexpr std::array<double, kNeighbors> kNeighborBearing{0, 45, 90, 135, 180, 225, 270, 315};

/// Inclusive bounding box of burning cells; empty when row_min > row_max.
struct ActiveWindow {
  int row_min = 0;
  int row_max = -1;
  int col_min = 0;
  int col_max = -1;
  [[nodiscard]] bool empty() const noexcept { return row_min > row_max; }
  void include(int r, int c) noexcept;
};

struct FireState {
  int rows = 0;
  int cols = 0;
  std::vector<CellStatus> status;
  /// Spread distance (m) accumulated by a burning cell toward each neighbour.
  std::vector<std::array<double, kNeighbors>> progress;
  std::vector<std::int32_t> burn_age;
  std::int64_t t = 0;
  ActiveWindow active;

  FireState() = default;
  FireState(int r, int c);

  [[nodiscard]] std::size_t index(Cell cell) const noexcept {
    return static_cast<std::size_t>(cell.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(cell.col);
  }
  [[nodiscard]] bool contains(Cell cell) const noexcept {
    return cell.row >= 0 && cell.col >= 0 && cell.row < rows && cell.col < cols;
  }
  [[nodiscard]] CellStatus at(Cell cell) const { return status.at(index(cell)); }
  [[nodiscard]] std::size_t size() const noexcept { return status.size(); }
  [[nodiscard]] Grid<std::int32_t> status_grid() const;

  /// Compares the simulation state; the active window is a cache and ignored.
  friend bool operator==(const FireState& a, const FireState& b) {
    return a.rows == b.rows && a.cols == b.cols && a.t == b.t && a.status == b.status && a.progress == b.progress &&
           a.burn_age == b.burn_age;
  }

  std::vector<CellStatus> scratch;  // previous-step statuses, reused by step_fire
};

/// Unburned -> Burning with zero progress and age. Other statuses are left
/// alone. Returns whether the cell changed; throws OutOfRangeError.
bool ignite(FireState& state, Cell cell);

/// Unburned -> the mitigation's status; first placement wins and burning or
/// burned cells are unaffected. Returns whether the cell changed.
bool apply_mitigation(FireState& state, Cell cell, MitigationKind kind);

[[nodiscard]] bool is_active(const FireState& state) noexcept;

struct DamageCounts {
  std::int64_t burned = 0;
  std::int64_t burning = 0;
  std::int64_t mitigated = 0;
  friend bool operator==(const DamageCounts&, const DamageCounts&) = default;
};

[[nodiscard]] DamageCounts damage_counts(const FireState& state) noexcept;

/// Precomputed spread kernel for one scenario: per wind frame, the Rothermel
/// rate (ft/min) into each cell along each of the 8 travel directions, using
/// the target cell's fuel, projected wind and projected slope. Immutable once
/// built, so one model is shared by every rollout of a scenario.
class SpreadModel {
 public:
  SpreadModel() = default;
  /// Throws DimensionError when the wind frames do not match the stack.
  static SpreadModel build(const LayerStack& stack, const SlopeField& slope, const WindField& wind,
                           const FireConfig& config);

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] const FireConfig& config() const noexcept { return config_; }
  /// Converts a spread rate (ft/min) into metres per step, attenuation included.
  [[nodiscard]] double meters_per_rate() const noexcept { return meters_per_rate_; }
  [[nodiscard]] double crossing(int d) const noexcept { return crossing_[static_cast<std::size_t>(d)]; }
  [[nodiscard]] std::span<const double> table_for(std::int64_t t) const noexcept;
  [[nodiscard]] double multiplier(CellStatus target) const noexcept;
  /// Spread rate (ft/min, before attenuation and mitigation) into `cell`
  /// travelling along neighbour direction d at timestep t.
  [[nodiscard]] double rate(std::int64_t t, Cell cell, int d) const noexcept;

 private:
  int rows_ = 0;
  int cols_ = 0;
  FireConfig config_;
  std::array<double, kNeighbors> crossing_{};
  double meters_per_rate_ = 0.0;
  std::vector<std::vector<double>> tables_;
};

/// Advances one fire timestep in place (OpenMP over the active window).
void step_fire(FireState& state, const SpreadModel& model);
/// Full-grid single-threaded reference; bit-identical to step_fire.
void step_fire_reference(FireState& state, const SpreadModel& model);
/// Builds the spread model on the fly; prefer the SpreadModel overload in loops.
void step_fire(FireState& state, const LayerStack& stack, const WindField& wind, const FireConfig& config);

}  // namespace emberline
