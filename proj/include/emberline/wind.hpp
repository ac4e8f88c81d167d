#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "emberline/grid.hpp"

namespace emberline {

class LayerStack;

/// Wind direction is the direction of travel in degrees clockwise from grid
/// north (0 = blowing toward row 0, 90 = toward the last column). Speed is mph.
enum class WindMode : std::uint8_t { constant, generated, fluid };

[[nodiscard]] std::string_view wind_mode_name(WindMode mode) noexcept;

struct WindSample {
  double speed = 0.0;
  double direction = 0.0;
  friend bool operator==(const WindSample&, const WindSample&) = default;
};

struct WindFrame {
  Grid<float> speed;
  Grid<float> direction;
  friend bool operator==(const WindFrame&, const WindFrame&) = default;
};

/// Normalizes any finite angle to [0, 360).
[[nodiscard]] double normalize_degrees(double degrees) noexcept;

class WindField {
 public:
  WindField() = default;

  /// Throws std::invalid_argument for negative or non-finite speed.
  static WindField constant(double speed_mph, double direction_deg);
  /// Frames must be non-empty, equally shaped, with speed >= 0 and
  /// direction in [0, 360).
  static WindField from_frames(WindMode mode, std::vector<WindFrame> frames);

  [[nodiscard]] WindMode mode() const noexcept { return mode_; }
  /// Number of stored frames; 0 for constant fields.
  [[nodiscard]] int frame_count() const noexcept { return static_cast<int>(frames_.size()); }
  [[nodiscard]] const WindFrame& frame(int k) const { return frames_.at(static_cast<std::size_t>(k)); }
  /// Frame used at fire timestep t: t clamped into [0, frame_count - 1].
  [[nodiscard]] int frame_index(std::int64_t t) const noexcept;
  [[nodiscard]] bool time_invariant() const noexcept { return frames_.size() <= 1; }

  [[nodiscard]] WindSample sample(std::int64_t t, Cell cell) const;

  [[nodiscard]] double constant_speed() const noexcept { return speed_; }
  [[nodiscard]] double constant_direction() const noexcept { return direction_; }

  friend bool operator==(const WindField&, const WindField&) = default;

 private:
  WindMode mode_ = WindMode::constant;
  double speed_ = 0.0;
  double direction_ = 0.0;
  std::vector<WindFrame> frames_;
};

[[nodiscard]] inline WindField constant_wind(double speed_mph, double direction_deg) {
  return WindField::constant(speed_mph, direction_deg);
}

[[nodiscard]] inline WindSample sample_wind(const WindField& field, std::int64_t t, Cell cell) {
  return field.sample(t, cell);
}

/// Noise-driven field: a base wind perturbed by drifting fractal noise.
struct NoiseWindParams {
  double base_speed = 5.0;
  double base_direction = 0.0;
  double speed_variation = 2.0;   // peak deviation from base, mph
  double direction_spread = 30.0; // peak deviation from base, degrees
  double frequency = 3.0;
  double drift = 0.05;            // lattice shift per frame
};

[[nodiscard]] WindField generate_wind_noise(std::uint64_t seed, int rows, int cols, int steps,
                                            const NoiseWindParams& params);

enum class PressureSolver : std::uint8_t { conjugate_gradient, jacobi };

struct FluidParams {
  double viscosity = 0.01;
  double base_speed = 5.0;       // initial uniform wind, mph
  double base_direction = 0.0;
  double forcing = 0.0;          // peak vortex forcing, mph per unit solver time
  int vortices = 4;
  double dt = 0.1;               // solver time per frame; displacement in cells = mph * dt
  int diffusion_iterations = 20;
  PressureSolver solver = PressureSolver::conjugate_gradient;
  int pressure_iterations = 20;  // Jacobi sweeps; CG iteration cap is derived from the grid size
  double pressure_tolerance = 1e-12;
};

/// Stable-fluids wind (advect, diffuse, project) on a periodic staggered grid
/// shaped like `stack`, one frame per fire timestep.
/// Throws std::invalid_argument for viscosity <= 0 or steps < 1.
[[nodiscard]] WindField generate_wind_fluid(std::uint64_t seed, const LayerStack& stack, int steps,
                                            const FluidParams& params);

/// Writes `<prefix>_speed_<k>.grid` and `<prefix>_direction_<k>.grid` per frame.
void export_wind_frames(const WindField& field, const std::filesystem::path& dir, std::string_view prefix = "wind");

}  // namespace emberline
