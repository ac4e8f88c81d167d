#include "emberline/terrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "emberline/errors.hpp"
#include "emberline/noise.hpp"
#include "emberline/seeding.hpp"
#include "emberline/wind.hpp"

namespace emberline {

void FuelCatalog::add(FuelModel model) {
  const auto& p = model.params;
  if (!(p.w0 >= 0.0) || !(p.sigma > 0.0) || !(p.delta > 0.0) || !(p.mx > 0.0 && p.mx < 1.0)) {
    throw std::invalid_argument("FuelCatalog::add: invalid parameters for fuel " + std::to_string(model.id));
  }
  if (entries_.contains(model.id)) {
    throw std::invalid_argument("FuelCatalog::add: duplicate fuel id " + std::to_string(model.id));
  }
  entries_.emplace(model.id, std::move(model));
}

const FuelModel& FuelCatalog::lookup(int id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw UnknownFuelError(id);
  return it->second;
}

FuelCatalog catalog_standard() {
  // Anderson (1982) Table: 1-hr load (tons/acre), characteristic SAV (1/ft),
  // depth (ft), dead fuel moisture of extinction (percent).
  struct Row {
    int id;
    const char* name;
    double load_tons_per_acre;
    double sigma;
    double depth;
    double mx_percent;
  };
  static constexpr std::array<Row, 13> kAnderson{{
      {1, "Short grass (1 ft)", 0.74, 3500, 1.0, 12},
      {2, "Timber (grass and understory)", 2.00, 2784, 1.0, 15},
      {3, "Tall grass (2.5 ft)", 3.01, 1500, 2.5, 25},
      {4, "Chaparral (6 ft)", 5.01, 1739, 6.0, 20},
      {5, "Brush (2 ft)", 1.00, 1683, 2.0, 20},
      {6, "Dormant brush, hardwood slash", 1.50, 1564, 2.5, 25},
      {7, "Southern rough", 1.13, 1552, 2.5, 40},
      {8, "Closed timber litter", 1.50, 1889, 0.2, 30},
      {9, "Hardwood litter", 2.92, 2484, 0.2, 25},
      {10, "Timber (litter and understory)", 3.01, 1764, 1.0, 25},
      {11, "Light logging slash", 1.50, 1182, 1.0, 15},
      {12, "Medium logging slash", 4.01, 1145, 2.3, 20},
      {13, "Heavy logging slash", 7.01, 1159, 3.0, 25},
  }};
  constexpr double kLbPerFt2PerTonPerAcre = 2000.0 / 43560.0;

  FuelCatalog catalog;
  catalog.add({kNonBurnableFuel, "Non-burnable", FuelParams{0.0, 1.0, 1.0, 0.5}});
  for (const Row& row : kAnderson) {
    catalog.add({row.id, row.name,
                 FuelParams{row.load_tons_per_acre * kLbPerFt2PerTonPerAcre, row.sigma, row.depth,
                            row.mx_percent / 100.0}});
  }
  return catalog;
}

std::shared_ptr<const FuelCatalog> shared_standard_catalog() {
  static const auto catalog = std::make_shared<const FuelCatalog>(catalog_standard());
  return catalog;
}

LayerStack LayerStack::bind(Grid<int> fuel_id, Grid<double> elevation_ft, double cell_size_m,
                            std::optional<GeoOrigin> origin, std::shared_ptr<const FuelCatalog> catalog) {
  if (!catalog) throw std::invalid_argument("LayerStack::bind: null catalog");
  if (fuel_id.empty()) throw DimensionError("LayerStack::bind: empty fuel grid");
  if (!fuel_id.same_shape(elevation_ft)) {
    throw DimensionError("LayerStack::bind: fuel grid " + std::to_string(fuel_id.rows()) + "x" +
                         std::to_string(fuel_id.cols()) + " vs elevation grid " +
                         std::to_string(elevation_ft.rows()) + "x" + std::to_string(elevation_ft.cols()));
  }
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw std::invalid_argument("LayerStack::bind: cell_size must be positive");
  }
  for (int id : fuel_id.values()) {
    if (!catalog->contains(id)) throw UnknownFuelError(id);
  }
  for (double z : elevation_ft.values()) {
    if (!std::isfinite(z)) throw std::invalid_argument("LayerStack::bind: non-finite elevation");
  }
  LayerStack stack;
  stack.fuel_id_ = std::move(fuel_id);
  stack.elevation_ = std::move(elevation_ft);
  stack.cell_size_ = cell_size_m;
  stack.origin_ = origin;
  stack.catalog_ = std::move(catalog);
  return stack;
}

LayerStack generate_procedural(std::uint64_t seed, int rows, int cols, const ProceduralParams& params,
                               std::shared_ptr<const FuelCatalog> catalog) {
  if (rows < 2 || cols < 2) throw DimensionError("generate_procedural: rows and cols must be >= 2");
  if (params.fuel_ids.empty()) throw std::invalid_argument("generate_procedural: empty fuel mix");
  if (params.elevation_max < params.elevation_min) {
    throw std::invalid_argument("generate_procedural: elevation_max < elevation_min");
  }

  const FractalNoise terrain_noise{params.octaves, params.persistence, params.frequency};
  Grid<double> elevation = value_noise(derive_seed(seed, "elevation"), rows, cols, terrain_noise);
  const double span = params.elevation_max - params.elevation_min;
  for (double& z : elevation.values()) z = params.elevation_min + z * span;

  Grid<int> fuel(rows, cols, params.fuel_ids.front());
  const auto kinds = static_cast<int>(params.fuel_ids.size());
  if (kinds > 1) {
    const FractalNoise fuel_noise{2, 0.5, params.fuel_frequency};
    const Grid<double> mix = value_noise(derive_seed(seed, "fuel"), rows, cols, fuel_noise);
    for (std::size_t i = 0; i < fuel.size(); ++i) {
      const int k = std::min(kinds - 1, static_cast<int>(mix[i] * kinds));
      fuel[i] = params.fuel_ids[static_cast<std::size_t>(k)];
    }
  }
  if (params.nonburnable_fraction > 0.0) {
    const FractalNoise rock_noise{2, 0.5, params.fuel_frequency * 1.5};
    const Grid<double> rock = value_noise(derive_seed(seed, "nonburnable"), rows, cols, rock_noise);
    for (std::size_t i = 0; i < fuel.size(); ++i) {
      if (rock[i] < params.nonburnable_fraction) fuel[i] = kNonBurnableFuel;
    }
  }
  return LayerStack::bind(std::move(fuel), std::move(elevation), params.cell_size, params.origin,
                          std::move(catalog));
}

SlopeField slope_aspect(const LayerStack& stack) {
  const int rows = stack.rows();
  const int cols = stack.cols();
  const Grid<double>& z = stack.elevation();
  const double h = stack.cell_size() * kFeetPerMeter;
  SlopeField out{Grid<double>(rows, cols, 0.0), Grid<double>(rows, cols, 0.0)};

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      // East-positive and north-positive partial derivatives.
      double dz_east = 0.0;
      if (cols > 1) {
        const int w = std::max(c - 1, 0);
        const int e = std::min(c + 1, cols - 1);
        dz_east = (z(r, e) - z(r, w)) / (h * (e - w));
      }
      double dz_north = 0.0;
      if (rows > 1) {
        const int n = std::max(r - 1, 0);
        const int s = std::min(r + 1, rows - 1);
        dz_north = (z(n, c) - z(s, c)) / (h * (s - n));
      }
      const double slope = std::hypot(dz_east, dz_north);
      out.slope(r, c) = slope;
      if (slope > 0.0) {
        double aspect = std::atan2(-dz_east, -dz_north) * 180.0 / std::numbers::pi;
        if (aspect < 0.0) aspect += 360.0;
        if (aspect >= 360.0) aspect -= 360.0;
        out.aspect(r, c) = aspect;
      }
    }
  }
  return out;
}

std::string_view attribute_name(Attribute a) noexcept {
  switch (a) {
    case Attribute::w0: return "w0";
    case Attribute::sigma: return "sigma";
    case Attribute::delta: return "delta";
    case Attribute::mx: return "mx";
    case Attribute::elevation: return "elevation";
    case Attribute::wind_speed: return "wind_speed";
    case Attribute::wind_direction: return "wind_direction";
  }
  return "?";
}

Attribute parse_attribute(std::string_view name) {
  for (auto a : {Attribute::w0, Attribute::sigma, Attribute::delta, Attribute::mx, Attribute::elevation,
                 Attribute::wind_speed, Attribute::wind_direction}) {
    if (attribute_name(a) == name) return a;
  }
  throw ConfigError("", "unknown attribute '" + std::string(name) +
                            "' (expected w0, sigma, delta, mx, elevation, wind_speed, wind_direction)");
}

const Range& LayerBounds::of(Attribute a) const noexcept {
  switch (a) {
    case Attribute::w0: return w0;
    case Attribute::sigma: return sigma;
    case Attribute::delta: return delta;
    case Attribute::mx: return mx;
    case Attribute::elevation: return elevation;
    case Attribute::wind_speed: return wind_speed;
    case Attribute::wind_direction: return wind_direction;
  }
  return w0;
}

namespace {

struct RangeAccumulator {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  [[nodiscard]] Range range() const { return lo <= hi ? Range{lo, hi} : Range{}; }
};

}  // namespace

LayerBounds layer_bounds(const LayerStack& stack, const WindField& wind) {
  RangeAccumulator w0, sigma, delta, mx, elevation, speed, direction;
  for (std::size_t i = 0; i < stack.cell_count(); ++i) {
    const FuelParams& p = stack.fuel_at(i).params;
    w0.add(p.w0);
    sigma.add(p.sigma);
    delta.add(p.delta);
    mx.add(p.mx);
    elevation.add(stack.elevation()[i]);
  }
  if (wind.mode() == WindMode::constant) {
    speed.add(wind.constant_speed());
    direction.add(wind.constant_direction());
  }
  for (int k = 0; k < wind.frame_count(); ++k) {
    const WindFrame& frame = wind.frame(k);
    for (float v : frame.speed.values()) speed.add(v);
    for (float v : frame.direction.values()) direction.add(v);
  }
  return LayerBounds{w0.range(),        sigma.range(),     delta.range(),        mx.range(),
                     elevation.range(), speed.range(), direction.range()};
}

}  // namespace emberline
