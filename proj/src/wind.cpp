#include "emberline/wind.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "emberline/fluid.hpp"
#include "emberline/noise.hpp"
#include "emberline/seeding.hpp"
#include "emberline/terrain.hpp"

namespace emberline {

std::string_view wind_mode_name(WindMode mode) noexcept {
  switch (mode) {
    case WindMode::constant: return "constant";
    case WindMode::generated: return "generated";
    case WindMode::fluid: return "fluid";
  }
  return "?";
}

double normalize_degrees(double degrees) noexcept {
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) d += 360.0;
  if (d >= 360.0) d = 0.0;
  return d;
}

WindField WindField::constant(double speed_mph, double direction_deg) {
  if (!(speed_mph >= 0.0) || !std::isfinite(speed_mph)) {
    throw std::invalid_argument("constant_wind: speed must be a finite value >= 0");
  }
  if (!std::isfinite(direction_deg)) throw std::invalid_argument("constant_wind: non-finite direction");
  WindField field;
  field.mode_ = WindMode::constant;
  field.speed_ = speed_mph;
  field.direction_ = normalize_degrees(direction_deg);
  return field;
}

WindField WindField::from_frames(WindMode mode, std::vector<WindFrame> frames) {
  if (frames.empty()) throw std::invalid_argument("WindField::from_frames: no frames");
  const auto& first = frames.front().speed;
  for (const WindFrame& f : frames) {
    if (!f.speed.same_shape(first) || !f.direction.same_shape(first)) {
      throw std::invalid_argument("WindField::from_frames: frame shapes differ");
    }
    for (float s : f.speed.values()) {
      if (!(s >= 0.0F) || !std::isfinite(s)) throw std::invalid_argument("WindField::from_frames: bad speed");
    }
    for (float d : f.direction.values()) {
      if (!(d >= 0.0F && d < 360.0F)) throw std::invalid_argument("WindField::from_frames: direction out of range");
    }
  }
  WindField field;
  field.mode_ = mode;
  field.frames_ = std::move(frames);
  return field;
}

int WindField::frame_index(std::int64_t t) const noexcept {
  if (frames_.empty() || t <= 0) return 0;
  const auto last = static_cast<std::int64_t>(frames_.size()) - 1;
  return static_cast<int>(std::min(t, last));
}

WindSample WindField::sample(std::int64_t t, Cell cell) const {
  if (frames_.empty()) return {speed_, direction_};
  const WindFrame& f = frames_[static_cast<std::size_t>(frame_index(t))];
  return {f.speed.at(cell), f.direction.at(cell)};
}

namespace {

float to_direction(double degrees) {
  auto d = static_cast<float>(normalize_degrees(degrees));
  return d >= 360.0F ? 0.0F : d;
}

}  // namespace

WindField generate_wind_noise(std::uint64_t seed, int rows, int cols, int steps, const NoiseWindParams& params) {
  if (steps < 1) throw std::invalid_argument("generate_wind_noise: steps must be >= 1");
  if (params.base_speed < 0.0) throw std::invalid_argument("generate_wind_noise: negative base speed");
  const FractalNoise noise{3, 0.5, params.frequency};
  std::vector<WindFrame> frames;
  frames.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double offset = params.drift * k;
    const Grid<double> s = value_noise(derive_seed(seed, "wind-speed"), rows, cols, noise, offset);
    const Grid<double> d = value_noise(derive_seed(seed, "wind-direction"), rows, cols, noise, offset);
    WindFrame frame{Grid<float>(rows, cols, 0.0F), Grid<float>(rows, cols, 0.0F)};
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double speed = params.base_speed + params.speed_variation * (2.0 * s[i] - 1.0);
      frame.speed[i] = static_cast<float>(std::max(0.0, speed));
      frame.direction[i] = to_direction(params.base_direction + params.direction_spread * (2.0 * d[i] - 1.0));
    }
    frames.push_back(std::move(frame));
  }
  return WindField::from_frames(WindMode::generated, std::move(frames));
}

WindField generate_wind_fluid(std::uint64_t seed, const LayerStack& stack, int steps, const FluidParams& params) {
  if (steps < 1) throw std::invalid_argument("generate_wind_fluid: steps must be >= 1");
  if (!(params.viscosity > 0.0)) throw std::invalid_argument("generate_wind_fluid: viscosity must be positive");
  fluid::StableFluids solver(stack.rows(), stack.cols(), seed, params);
  std::vector<WindFrame> frames;
  frames.reserve(static_cast<std::size_t>(steps));
  frames.push_back(solver.frame());
  for (int k = 1; k < steps; ++k) {
    solver.step();
    frames.push_back(solver.frame());
  }
  return WindField::from_frames(WindMode::fluid, std::move(frames));
}

void export_wind_frames(const WindField& field, const std::filesystem::path& dir, std::string_view prefix) {
  std::filesystem::create_directories(dir);
  for (int k = 0; k < field.frame_count(); ++k) {
    const std::string tag = std::to_string(k);
    write_grid_file(dir / (std::string(prefix) + "_speed_" + tag + ".grid"), field.frame(k).speed);
    write_grid_file(dir / (std::string(prefix) + "_direction_" + tag + ".grid"), field.frame(k).direction);
  }
}

}  // namespace emberline
