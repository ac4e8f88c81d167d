#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "emberline/errors.hpp"
#include "emberline/terrain.hpp"

namespace emberline {
namespace {

constexpr std::string_view kMagic = "EMBERGRID v1";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

int parse_dim(std::string_view token, const std::string& where) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value < 1) {
    throw MalformedGridError(where + ": bad dimension '" + std::string(token) + "'");
  }
  return value;
}

std::string format_value(float v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

template <typename T, typename Fmt>
void write_body(const std::filesystem::path& path, const Grid<T>& grid, std::string_view dtype, Fmt&& fmt) {
  std::ofstream out = open_for_write(path);
  out << kMagic << '\n' << "rows " << grid.rows() << " cols " << grid.cols() << " dtype " << dtype << '\n';
  std::string line;
  for (int r = 0; r < grid.rows(); ++r) {
    line.clear();
    for (int c = 0; c < grid.cols(); ++c) {
      if (c > 0) line += ' ';
      line += fmt(grid(r, c));
    }
    line += '\n';
    out << line;
  }
}

}  // namespace

GridFile read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open grid file " + path.string());
  const std::string where = path.string();

  std::string line;
  if (!std::getline(in, line) || split_ws(line).size() != 2 || line.rfind(kMagic, 0) != 0) {
    throw MalformedGridError(where + ": missing 'EMBERGRID v1' magic line");
  }
  if (!std::getline(in, line)) throw MalformedGridError(where + ": missing shape line");
  const auto header = split_ws(line);
  if (header.size() != 6 || header[0] != "rows" || header[2] != "cols" || header[4] != "dtype") {
    throw MalformedGridError(where + ": shape line must read 'rows <R> cols <C> dtype <f32|i32>'");
  }
  const int rows = parse_dim(header[1], where);
  const int cols = parse_dim(header[3], where);
  GridFile file;
  if (header[5] == "f32") {
    file.dtype = GridDtype::f32;
  } else if (header[5] == "i32") {
    file.dtype = GridDtype::i32;
  } else {
    throw MalformedGridError(where + ": unknown dtype '" + std::string(header[5]) + "'");
  }

  file.values = Grid<double>(rows, cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw MalformedGridError(where + ": expected " + std::to_string(rows) + " data rows, found " +
                               std::to_string(r));
    }
    const auto tokens = split_ws(line);
    if (static_cast<int>(tokens.size()) != cols) {
      throw MalformedGridError(where + ": row " + std::to_string(r) + " has " + std::to_string(tokens.size()) +
                               " values, expected " + std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) {
      const std::string_view tok = tokens[static_cast<std::size_t>(c)];
      const char* end = tok.data() + tok.size();
      double value = 0.0;
      if (file.dtype == GridDtype::i32) {
        std::int32_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
          throw MalformedGridError(where + ": bad i32 value '" + std::string(tok) + "'");
        }
        value = v;
      } else {
        float v = 0.0F;
        const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
          throw MalformedGridError(where + ": bad f32 value '" + std::string(tok) + "'");
        }
        if (!std::isfinite(v)) throw MalformedGridError(where + ": non-finite value '" + std::string(tok) + "'");
        value = v;
      }
      file.values(r, c) = value;
    }
  }
  while (std::getline(in, line)) {
    if (!split_ws(line).empty()) {
      throw MalformedGridError(where + ": more data rows than the declared " + std::to_string(rows));
    }
  }
  return file;
}

void write_grid_file(const std::filesystem::path& path, const Grid<std::int32_t>& grid) {
  write_body(path, grid, "i32", [](std::int32_t v) { return std::to_string(v); });
}

void write_grid_file(const std::filesystem::path& path, const Grid<float>& grid) {
  write_body(path, grid, "f32", [](float v) { return format_value(v); });
}

void write_grid_file(const std::filesystem::path& path, const Grid<double>& grid) {
  write_body(path, grid, "f32", [](double v) { return format_value(static_cast<float>(v)); });
}

Grid<double> load_raster(const std::filesystem::path& path, RasterAttribute attribute,
                         std::optional<GridShape> expected) {
  GridFile file = read_grid_file(path);
  if (attribute == RasterAttribute::fuel && file.dtype != GridDtype::i32) {
    throw MalformedGridError(path.string() + ": fuel rasters must use dtype i32");
  }
  if (expected && !file.values.same_shape(expected->rows, expected->cols)) {
    throw DimensionError(path.string() + ": grid is " + std::to_string(file.values.rows()) + "x" +
                         std::to_string(file.values.cols()) + ", stack is " + std::to_string(expected->rows) + "x" +
                         std::to_string(expected->cols));
  }
  return std::move(file.values);
}

LayerStack load_bundle(const std::filesystem::path& dir, std::shared_ptr<const FuelCatalog> catalog) {
  const Grid<double> fuel_raw = load_raster(dir / "fuel.grid", RasterAttribute::fuel);
  const Grid<double> elevation =
      load_raster(dir / "elevation.grid", RasterAttribute::elevation, GridShape{fuel_raw.rows(), fuel_raw.cols()});

  double cell_size = kDefaultCellSize;
  std::optional<GeoOrigin> origin;
  const auto meta_path = dir / "meta.yaml";
  if (!std::filesystem::exists(meta_path)) throw std::runtime_error("missing bundle metadata " + meta_path.string());
  try {
    const YAML::Node meta = YAML::LoadFile(meta_path.string());
    for (const auto& kv : meta) {
      const auto key = kv.first.as<std::string>();
      if (key != "cell_size" && key != "origin") {
        throw ConfigError(key, "unknown key in " + meta_path.string());
      }
    }
    if (meta["cell_size"]) cell_size = meta["cell_size"].as<double>();
    if (meta["origin"] && !meta["origin"].IsNull()) {
      const auto pair = meta["origin"].as<std::vector<double>>();
      if (pair.size() != 2) throw ConfigError("origin", "expected [lat, lon]");
      origin = GeoOrigin{pair[0], pair[1]};
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("", meta_path.string() + ": " + e.what());
  }

  Grid<int> fuel(fuel_raw.rows(), fuel_raw.cols(), 0);
  for (std::size_t i = 0; i < fuel.size(); ++i) fuel[i] = static_cast<int>(fuel_raw[i]);
  return LayerStack::bind(std::move(fuel), elevation, cell_size, origin, std::move(catalog));
}

void write_bundle(const std::filesystem::path& dir, const LayerStack& stack) {
  std::filesystem::create_directories(dir);
  Grid<std::int32_t> fuel(stack.rows(), stack.cols(), 0);
  for (std::size_t i = 0; i < fuel.size(); ++i) fuel[i] = stack.fuel_id()[i];
  write_grid_file(dir / "fuel.grid", fuel);
  write_grid_file(dir / "elevation.grid", stack.elevation());

  YAML::Emitter meta;
  meta.SetDoublePrecision(17);
  meta << YAML::BeginMap << YAML::Key << "cell_size" << YAML::Value << stack.cell_size();
  meta << YAML::Key << "origin" << YAML::Value;
  if (stack.origin()) {
    meta << YAML::Flow << YAML::BeginSeq << stack.origin()->lat << stack.origin()->lon << YAML::EndSeq;
  } else {
    meta << YAML::Null;
  }
  meta << YAML::EndMap;
  std::ofstream out(dir / "meta.yaml", std::ios::trunc);
  out << meta.c_str() << '\n';
}

}  // namespace emberline
