#pragma once

#include <span>

#include "emberline/terrain.hpp"

namespace emberline::rothermel {

// Fixed fuel particle properties used by the surface model.
inline constexpr double kHeatContent = 8000.0;          // h, BTU/lb
inline constexpr double kTotalMineralContent = 0.0555;  // S_T
inline constexpr double kEffectiveMineralContent = 0.010;  // S_e
inline constexpr double kParticleDensity = 32.0;         // rho_p, lb/ft^3
inline constexpr double kFeetPerMinutePerMph = 88.0;

/// Wind- and slope-independent terms for one fuel at one moisture.
/// Spread rate is base * (1 + wind_coef * U^wind_exp + slope_coef * tan^2),
/// U in ft/min.
struct SpreadTerms {
  double base = 0.0;  // R0, ft/min
  double wind_coef = 0.0;
  double wind_exp = 0.0;
  double slope_coef = 0.0;
};

[[nodiscard]] SpreadTerms spread_terms(const FuelParams& fuel, double moisture) noexcept;
[[nodiscard]] double spread_rate(const SpreadTerms& terms, double midflame_wind_mph, double slope) noexcept;

/// Rate of spread in ft/min. Zero for fuels with w0 = 0 and for moisture at
/// or above the moisture of extinction. Throws std::invalid_argument for
/// negative moisture, wind or slope.
[[nodiscard]] double rothermel_ros(const FuelParams& fuel, double moisture, double midflame_wind_mph, double slope);

struct RosInput {
  FuelParams fuel;
  double moisture = 0.0;
  double wind_mph = 0.0;
  double slope = 0.0;
};

/// Batched kernel; OpenMP over points. `out` must match `inputs` in size.
void ros_batch(std::span<const RosInput> inputs, std::span<double> out);
/// Single-threaded reference for ros_batch. Results are bit-identical.
void ros_batch_serial(std::span<const RosInput> inputs, std::span<double> out);

}  // namespace emberline::rothermel
