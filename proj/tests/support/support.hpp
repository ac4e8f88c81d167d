#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "emberline/fire.hpp"
#include "emberline/scenario.hpp"
#include "emberline/terrain.hpp"
#include "emberline/wind.hpp"

namespace emberline::testing {

/// Uniform-fuel world with elevation rising `rise_ft` per cell toward `bearing`
/// (0 = north, 90 = east).
inline LayerStack uniform_stack(int rows, int cols, int fuel_id, double rise_ft = 0.0, double bearing = 90.0,
                                double cell_size = kDefaultCellSize) {
  Grid<int> fuel(rows, cols, fuel_id);
  Grid<double> elevation(rows, cols, 100.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (bearing == 90.0) elevation(r, c) = 100.0 + rise_ft * c;
      else if (bearing == 270.0) elevation(r, c) = 100.0 + rise_ft * (cols - 1 - c);
      else if (bearing == 0.0) elevation(r, c) = 100.0 + rise_ft * (rows - 1 - r);
      else elevation(r, c) = 100.0 + rise_ft * r;
    }
  }
  return LayerStack::bind(std::move(fuel), std::move(elevation), cell_size, std::nullopt, shared_standard_catalog());
}

inline std::shared_ptr<const Scenario> uniform_scenario(int rows, int cols, int fuel_id, double wind_mph,
                                                        double wind_dir, std::optional<Cell> ignition,
                                                        int max_fire_duration = 30, double rise_ft = 0.0,
                                                        double bearing = 90.0) {
  FireConfig fire;
  fire.ignition = ignition;
  fire.max_fire_duration = max_fire_duration;
  return make_scenario(uniform_stack(rows, cols, fuel_id, rise_ft, bearing), WindField::constant(wind_mph, wind_dir),
                       fire);
}

inline std::shared_ptr<const Scenario> procedural_scenario(std::uint64_t seed, int rows, int cols,
                                                           std::optional<Cell> ignition = std::nullopt,
                                                           double wind_mph = 5.0, double wind_dir = 90.0) {
  ProceduralParams params;
  params.nonburnable_fraction = 0.05;
  FireConfig fire;
  fire.ignition = ignition;
  return make_scenario(generate_procedural(seed, rows, cols, params), WindField::constant(wind_mph, wind_dir), fire);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "emberline") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace emberline::testing
