#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emberline/grid.hpp"

namespace emberline {

/// Rothermel fuel bed parameters in the imperial units the model is published in.
struct FuelParams {
  double w0 = 0.0;     // oven-dry fuel load, lb/ft^2
  double sigma = 1.0;  // surface-area-to-volume ratio, ft^2/ft^3
  double delta = 1.0;  // fuel bed depth, ft
  double mx = 0.5;     // dead fuel moisture of extinction, fraction

  friend bool operator==(const FuelParams&, const FuelParams&) = default;
};

struct FuelModel {
  int id = 0;
  std::string name;
  FuelParams params;

  [[nodiscard]] bool burnable() const noexcept { return params.w0 > 0.0; }
  friend bool operator==(const FuelModel&, const FuelModel&) = default;
};

inline constexpr int kNonBurnableFuel = 0;

class FuelCatalog {
 public:
  /// Throws std::invalid_argument on duplicate ids or parameters outside
  /// w0 >= 0, sigma > 0, delta > 0, 0 < mx < 1.
  void add(FuelModel model);

  /// Throws UnknownFuelError for ids not in the catalog.
  [[nodiscard]] const FuelModel& lookup(int id) const;
  [[nodiscard]] bool contains(int id) const noexcept { return entries_.contains(id); }
  [[nodiscard]] const std::map<int, FuelModel>& entries() const noexcept { return entries_; }

 private:
  std::map<int, FuelModel> entries_;
};

/// The 13 Anderson (1982) behavior fuel models under ids 1-13 plus the
/// non-burnable sentinel under id 0. Each model is collapsed to a single
/// size class: w0 is the 1-hr dead load, sigma the characteristic SAV ratio.
[[nodiscard]] FuelCatalog catalog_standard();
[[nodiscard]] std::shared_ptr<const FuelCatalog> shared_standard_catalog();

struct GeoOrigin {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoOrigin&, const GeoOrigin&) = default;
};

inline constexpr double kFeetPerMeter = 1.0 / 0.3048;
inline constexpr double kDefaultCellSize = 30.0;

/// Co-registered fuel and elevation rasters.
///
/// cell_size is the length of one cell edge in meters; elevation is in feet.
class LayerStack {
 public:
  LayerStack() = default;

  /// Validates shapes, cell size, finiteness and that every fuel id resolves
  /// in `catalog` (UnknownFuelError otherwise).
  static LayerStack bind(Grid<int> fuel_id, Grid<double> elevation_ft, double cell_size_m,
                         std::optional<GeoOrigin> origin, std::shared_ptr<const FuelCatalog> catalog);

  [[nodiscard]] int rows() const noexcept { return fuel_id_.rows(); }
  [[nodiscard]] int cols() const noexcept { return fuel_id_.cols(); }
  [[nodiscard]] std::size_t cell_count() const noexcept { return fuel_id_.size(); }
  [[nodiscard]] double cell_size() const noexcept { return cell_size_; }
  [[nodiscard]] const Grid<int>& fuel_id() const noexcept { return fuel_id_; }
  [[nodiscard]] const Grid<double>& elevation() const noexcept { return elevation_; }
  [[nodiscard]] const std::optional<GeoOrigin>& origin() const noexcept { return origin_; }
  [[nodiscard]] const FuelCatalog& catalog() const noexcept { return *catalog_; }
  [[nodiscard]] const FuelModel& fuel_at(std::size_t i) const { return catalog_->lookup(fuel_id_[i]); }
  [[nodiscard]] bool contains(Cell c) const noexcept { return fuel_id_.contains(c); }

  friend bool operator==(const LayerStack& a, const LayerStack& b) {
    return a.fuel_id_ == b.fuel_id_ && a.elevation_ == b.elevation_ && a.cell_size_ == b.cell_size_ &&
           a.origin_ == b.origin_;
  }

 private:
  Grid<int> fuel_id_;
  Grid<double> elevation_;
  double cell_size_ = kDefaultCellSize;
  std::optional<GeoOrigin> origin_;
  std::shared_ptr<const FuelCatalog> catalog_;
};

struct ProceduralParams {
  int octaves = 4;
  double persistence = 0.5;
  double frequency = 4.0;  // base noise cycles across the longer grid edge
  double elevation_min = 0.0;
  double elevation_max = 500.0;
  std::vector<int> fuel_ids{1, 2, 3};
  double fuel_frequency = 3.0;
  double nonburnable_fraction = 0.0;
  double cell_size = kDefaultCellSize;
  std::optional<GeoOrigin> origin;
};

/// Fractal value-noise elevation and thresholded-noise fuel placement.
/// Pure function of (seed, rows, cols, params).
[[nodiscard]] LayerStack generate_procedural(std::uint64_t seed, int rows, int cols, const ProceduralParams& params,
                                             std::shared_ptr<const FuelCatalog> catalog = shared_standard_catalog());

/// Slope magnitude (rise/run) and downslope-facing aspect in degrees clockwise
/// from north. Flat cells report aspect 0.
struct SlopeField {
  Grid<double> slope;
  Grid<double> aspect;
};

[[nodiscard]] SlopeField slope_aspect(const LayerStack& stack);

enum class Attribute : std::uint8_t { w0, sigma, delta, mx, elevation, wind_speed, wind_direction };

[[nodiscard]] std::string_view attribute_name(Attribute a) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] Attribute parse_attribute(std::string_view name);

struct Range {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct LayerBounds {
  Range w0, sigma, delta, mx, elevation, wind_speed, wind_direction;
  [[nodiscard]] const Range& of(Attribute a) const noexcept;
};

class WindField;

[[nodiscard]] LayerBounds layer_bounds(const LayerStack& stack, const WindField& wind);

// ---------------------------------------------------------------------------
// EMBERGRID raster files

enum class GridDtype : std::uint8_t { f32, i32 };

struct GridFile {
  GridDtype dtype = GridDtype::f32;
  Grid<double> values;
};

/// Parses an EMBERGRID v1 file. Throws MalformedGridError (including
/// non-finite values) or std::runtime_error when the file cannot be opened.
[[nodiscard]] GridFile read_grid_file(const std::filesystem::path& path);

void write_grid_file(const std::filesystem::path& path, const Grid<std::int32_t>& grid);
void write_grid_file(const std::filesystem::path& path, const Grid<float>& grid);
void write_grid_file(const std::filesystem::path& path, const Grid<double>& grid);

enum class RasterAttribute : std::uint8_t { fuel, elevation };

struct GridShape {
  int rows = 0;
  int cols = 0;
};

/// Reads one layer raster. Fuel rasters must be i32. When `expected` is set, a
/// differently shaped file raises DimensionError.
[[nodiscard]] Grid<double> load_raster(const std::filesystem::path& path, RasterAttribute attribute,
                                       std::optional<GridShape> expected = std::nullopt);

/// Loads `fuel.grid`, `elevation.grid` and `meta.yaml` (cell_size, origin)
/// from a scenario bundle directory and binds them against `catalog`.
[[nodiscard]] LayerStack load_bundle(const std::filesystem::path& dir,
                                     std::shared_ptr<const FuelCatalog> catalog = shared_standard_catalog());

void write_bundle(const std::filesystem::path& dir, const LayerStack& stack);

}  // namespace emberline
