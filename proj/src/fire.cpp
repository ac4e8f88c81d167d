#include "emberline/fire.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "emberline/errors.hpp"
#include "emberline/rothermel.hpp"

namespace emberline {

std::string_view status_name(CellStatus s) noexcept {
  switch (s) {
    case CellStatus::unburned: return "unburned";
    case CellStatus::burning: return "burning";
    case CellStatus::burned: return "burned";
    case CellStatus::fireline: return "fireline";
    case CellStatus::scratchline: return "scratchline";
    case CellStatus::wetline: return "wetline";
  }
  return "?";
}

std::string_view mitigation_name(MitigationKind k) noexcept { return status_name(status_of(k)); }

MitigationKind parse_mitigation(std::string_view name) {
  if (name == "fireline") return MitigationKind::fireline;
  if (name == "scratchline") return MitigationKind::scratchline;
  if (name == "wetline") return MitigationKind::wetline;
  throw std::invalid_argument("unknown mitigation kind '" + std::string(name) +
                              "' (allowed: fireline, scratchline, wetline)");
}

void FireConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("fire config: " + what); };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be > 0");
  if (!(attenuation >= 0.0 && attenuation <= 1.0)) fail("attenuation must be in [0, 1]");
  if (!(mitigation.scratchline >= 0.0 && mitigation.scratchline <= 1.0)) fail("scratchline must be in [0, 1]");
  if (!(mitigation.wetline >= 0.0 && mitigation.wetline <= 1.0)) fail("wetline must be in [0, 1]");
  if (max_fire_duration < 1) fail("max_fire_duration must be >= 1");
  if (!(dead_fuel_moisture >= 0.0 && dead_fuel_moisture < 1.0)) fail("dead_fuel_moisture must be in [0, 1)");
  if (step_cap < 1) fail("step_cap must be >= 1");
}

void ActiveWindow::include(int r, int c) noexcept {
  if (empty()) {
    row_min = row_max = r;
    col_min = col_max = c;
    return;
  }
  row_min = std::min(row_min, r);
  row_max = std::max(row_max, r);
  col_min = std::min(col_min, c);
  col_max = std::max(col_max, c);
}

FireState::FireState(int r, int c)
    : rows(r),
      cols(c),
      status(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), CellStatus::unburned),
      progress(status.size(), std::array<double, kNeighbors>{}),
      burn_age(status.size(), 0) {
  if (r < 1 || c < 1) throw DimensionError("FireState: grid must be non-empty");
}

Grid<std::int32_t> FireState::status_grid() const {
  Grid<std::int32_t> g(rows, cols, 0);
  for (std::size_t i = 0; i < status.size(); ++i) g[i] = code(status[i]);
  return g;
}

bool ignite(FireState& state, Cell cell) {
  if (!state.contains(cell)) throw OutOfRangeError("ignite: cell out of bounds");
  const std::size_t i = state.index(cell);
  if (state.status[i] != CellStatus::unburned) return false;
  state.status[i] = CellStatus::burning;
  state.progress[i] = {};
  state.burn_age[i] = 0;
  state.active.include(cell.row, cell.col);
  return true;
}

bool apply_mitigation(FireState& state, Cell cell, MitigationKind kind) {
  if (!state.contains(cell)) throw OutOfRangeError("apply_mitigation: cell out of bounds");
  const std::size_t i = state.index(cell);
  if (state.status[i] != CellStatus::unburned) return false;
  state.status[i] = status_of(kind);
  return true;
}

bool is_active(const FireState& state) noexcept {
  return std::any_of(state.status.begin(), state.status.end(), [](CellStatus s) { return s == CellStatus::burning; });
}

DamageCounts damage_counts(const FireState& state) noexcept {
  DamageCounts counts;
  for (CellStatus s : state.status) {
    if (s == CellStatus::burned) {
      ++counts.burned;
    } else if (s == CellStatus::burning) {
      ++counts.burning;
    } else if (is_mitigation(s)) {
      ++counts.mitigated;
    }
  }
  return counts;
}

SpreadModel SpreadModel::build(const LayerStack& stack, const SlopeField& slope, const WindField& wind,
                               const FireConfig& config) {
  config.validate();
  const int rows = stack.rows();
  const int cols = stack.cols();
  if (!slope.slope.same_shape(rows, cols)) throw DimensionError("SpreadModel: slope field shape mismatch");
  if (wind.frame_count() > 0 && !wind.frame(0).speed.same_shape(rows, cols)) {
    throw DimensionError("SpreadModel: wind field shape mismatch");
  }

  SpreadModel model;
  model.rows_ = rows;
  model.cols_ = cols;
  model.config_ = config;
  for (int d = 0; d < kNeighbors; ++d) {
    const bool diagonal = kNeighborRow[d] != 0 && kNeighborCol[d] != 0;
    model.crossing_[static_cast<std::size_t>(d)] = diagonal ? stack.cell_size() * std::numbers::sqrt2 : stack.cell_size();
  }
  // ft/min -> m per step, with the global attenuation folded in.
  model.meters_per_rate_ = config.attenuation * config.dt * 0.3048;

  const std::size_t cells = stack.cell_count();
  const int frames = std::max(1, wind.frame_count());
  std::vector<rothermel::RosInput> inputs(cells * kNeighbors);
  constexpr double kDeg = std::numbers::pi / 180.0;
  for (int k = 0; k < frames; ++k) {
    for (std::size_t i = 0; i < cells; ++i) {
      const Cell cell{static_cast<int>(i / static_cast<std::size_t>(cols)),
                      static_cast<int>(i % static_cast<std::size_t>(cols))};
      const WindSample w = wind.sample(k, cell);
      const FuelParams& fuel = stack.fuel_at(i).params;
      const double upslope = slope.aspect[i] + 180.0;
      for (int d = 0; d < kNeighbors; ++d) {
        const double bearing = kNeighborBearing[static_cast<std::size_t>(d)];
        rothermel::RosInput& in = inputs[i * kNeighbors + static_cast<std::size_t>(d)];
        in.fuel = fuel;
        in.moisture = config.dead_fuel_moisture;
        in.wind_mph = w.speed * std::max(0.0, std::cos((w.direction - bearing) * kDeg));
        in.slope = slope.slope[i] * std::max(0.0, std::cos((upslope - bearing) * kDeg));
      }
    }
    std::vector<double> table(inputs.size(), 0.0);
    rothermel::ros_batch(inputs, table);
    model.tables_.push_back(std::move(table));
  }
  return model;
}

std::span<const double> SpreadModel::table_for(std::int64_t t) const noexcept {
  if (tables_.size() == 1 || t <= 0) return tables_.front();
  const auto last = static_cast<std::int64_t>(tables_.size()) - 1;
  return tables_[static_cast<std::size_t>(std::min(t, last))];
}

double SpreadModel::multiplier(CellStatus target) const noexcept {
  switch (target) {
    case CellStatus::unburned: return 1.0;
    case CellStatus::scratchline: return config_.mitigation.scratchline;
    case CellStatus::wetline: return config_.mitigation.wetline;
    default: return 0.0;
  }
}

double SpreadModel::rate(std::int64_t t, Cell cell, int d) const noexcept {
  const auto i = static_cast<std::size_t>(cell.row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(cell.col);
  return table_for(t)[i * kNeighbors + static_cast<std::size_t>(d)];
}

namespace {

void check_shape(const FireState& state, const SpreadModel& model) {
  if (state.rows != model.rows() || state.cols != model.cols()) {
    throw DimensionError("step_fire: fire state " + std::to_string(state.rows) + "x" + std::to_string(state.cols) +
                         " vs model " + std::to_string(model.rows()) + "x" + std::to_string(model.cols()));
  }
}

// Phase 1 for one burning source: accumulate progress toward each neighbour.
inline void advance_source(FireState& state, const SpreadModel& model, std::span<const double> table, double scale,
                           int r, int c) {
  const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(state.cols) + static_cast<std::size_t>(c);
  auto& progress = state.progress[i];
  for (int d = 0; d < kNeighbors; ++d) {
    const int nr = r + kNeighborRow[static_cast<std::size_t>(d)];
    const int nc = c + kNeighborCol[static_cast<std::size_t>(d)];
    if (nr < 0 || nc < 0 || nr >= state.rows || nc >= state.cols) continue;
    const std::size_t j = static_cast<std::size_t>(nr) * static_cast<std::size_t>(state.cols) + static_cast<std::size_t>(nc);
    const CellStatus target = state.scratch[j];
    if (!is_ignitable(target)) continue;
    const double inc = table[j * kNeighbors + static_cast<std::size_t>(d)] * scale * model.multiplier(target);
    if (inc <= 0.0) continue;
    progress[static_cast<std::size_t>(d)] = std::min(progress[static_cast<std::size_t>(d)] + inc, model.crossing(d));
  }
}

// Phase 2 for one cell: age burning cells, ignite reached cells. Returns the
// cell's new status.
inline CellStatus settle_cell(FireState& state, const SpreadModel& model, int r, int c) {
  const std::size_t j = static_cast<std::size_t>(r) * static_cast<std::size_t>(state.cols) + static_cast<std::size_t>(c);
  const CellStatus old = state.scratch[j];
  if (old == CellStatus::burning) {
    const std::int32_t age = state.burn_age[j] + 1;
    if (age >= model.config().max_fire_duration) {
      state.status[j] = CellStatus::burned;
      state.burn_age[j] = model.config().max_fire_duration;
    } else {
      state.burn_age[j] = age;
    }
    return state.status[j];
  }
  if (!is_ignitable(old)) return old;
  for (int d = 0; d < kNeighbors; ++d) {
    const int sr = r - kNeighborRow[static_cast<std::size_t>(d)];
    const int sc = c - kNeighborCol[static_cast<std::size_t>(d)];
    if (sr < 0 || sc < 0 || sr >= state.rows || sc >= state.cols) continue;
    const std::size_t i = static_cast<std::size_t>(sr) * static_cast<std::size_t>(state.cols) + static_cast<std::size_t>(sc);
    if (state.scratch[i] != CellStatus::burning) continue;
    if (state.progress[i][static_cast<std::size_t>(d)] >= model.crossing(d)) {
      state.status[j] = CellStatus::burning;
      state.burn_age[j] = 0;
      state.progress[j] = {};
      return CellStatus::burning;
    }
  }
  return old;
}

}  // namespace

void step_fire_reference(FireState& state, const SpreadModel& model) {
  check_shape(state, model);
  const std::span<const double> table = model.table_for(state.t);
  const double scale = model.meters_per_rate();
  state.scratch = state.status;
  for (int r = 0; r < state.rows; ++r) {
    for (int c = 0; c < state.cols; ++c) {
      if (state.scratch[state.index({r, c})] == CellStatus::burning) advance_source(state, model, table, scale, r, c);
    }
  }
  ActiveWindow next;
  for (int r = 0; r < state.rows; ++r) {
    for (int c = 0; c < state.cols; ++c) {
      if (settle_cell(state, model, r, c) == CellStatus::burning) next.include(r, c);
    }
  }
  state.active = next;
  ++state.t;
}

void step_fire(FireState& state, const SpreadModel& model) {
  check_shape(state, model);
  if (state.active.empty()) {
    ++state.t;
    return;
  }
  const std::span<const double> table = model.table_for(state.t);
  const double scale = model.meters_per_rate();
  state.scratch.resize(state.status.size());
  const ActiveWindow src = state.active;
  const int r0 = std::max(src.row_min - 1, 0);
  const int r1 = std::min(src.row_max + 1, state.rows - 1);
  const int c0 = std::max(src.col_min - 1, 0);
  const int c1 = std::min(src.col_max + 1, state.cols - 1);
  // Settling a cell reads sources one ring further out, so snapshot two rings.
  const int sc0 = std::max(c0 - 1, 0);
  const int sc1 = std::min(c1 + 1, state.cols - 1);
  for (int r = std::max(r0 - 1, 0); r <= std::min(r1 + 1, state.rows - 1); ++r) {
    const std::size_t row = state.index({r, 0});
    std::copy(state.status.begin() + static_cast<std::ptrdiff_t>(row + sc0),
              state.status.begin() + static_cast<std::ptrdiff_t>(row + sc1 + 1),
              state.scratch.begin() + static_cast<std::ptrdiff_t>(row + sc0));
  }

#pragma omp parallel for schedule(static)
  for (int r = src.row_min; r <= src.row_max; ++r) {
    for (int c = src.col_min; c <= src.col_max; ++c) {
      if (state.scratch[state.index({r, c})] == CellStatus::burning) advance_source(state, model, table, scale, r, c);
    }
  }

  int row_min = state.rows;
  int row_max = -1;
  int col_min = state.cols;
  int col_max = -1;
#pragma omp parallel for schedule(static) reduction(min : row_min, col_min) reduction(max : row_max, col_max)
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (settle_cell(state, model, r, c) == CellStatus::burning) {
        row_min = std::min(row_min, r);
        row_max = std::max(row_max, r);
        col_min = std::min(col_min, c);
        col_max = std::max(col_max, c);
      }
    }
  }
  state.active = row_max < 0 ? ActiveWindow{} : ActiveWindow{row_min, row_max, col_min, col_max};
  ++state.t;
}

void step_fire(FireState& state, const LayerStack& stack, const WindField& wind, const FireConfig& config) {
  const SpreadModel model = SpreadModel::build(stack, slope_aspect(stack), wind, config);
  step_fire(state, model);
}

}  // namespace emberline
