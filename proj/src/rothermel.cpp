#include "emberline/rothermel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace emberline::rothermel {

SpreadTerms spread_terms(const FuelParams& fuel, double moisture) noexcept {
  if (fuel.w0 <= 0.0 || moisture >= fuel.mx) return {};

  const double sigma = fuel.sigma;
  const double bulk_density = fuel.w0 / fuel.delta;
  const double packing = bulk_density / kParticleDensity;
  const double optimum_packing = 3.348 * std::pow(sigma, -0.8189);
  const double relative_packing = packing / optimum_packing;

  const double sigma15 = std::pow(sigma, 1.5);
  const double max_reaction_velocity = sigma15 / (495.0 + 0.0594 * sigma15);
  const double a = 133.0 * std::pow(sigma, -0.7913);
  const double reaction_velocity =
      max_reaction_velocity * std::pow(relative_packing, a) * std::exp(a * (1.0 - relative_packing));

  const double rm = moisture / fuel.mx;
  const double moisture_damping = 1.0 - 2.59 * rm + 5.11 * rm * rm - 3.52 * rm * rm * rm;
  const double mineral_damping = std::min(0.174 * std::pow(kEffectiveMineralContent, -0.19), 1.0);
  const double net_load = fuel.w0 * (1.0 - kTotalMineralContent);
  const double reaction_intensity = reaction_velocity * net_load * kHeatContent * moisture_damping * mineral_damping;

  const double flux_ratio =
      std::exp((0.792 + 0.681 * std::sqrt(sigma)) * (packing + 0.1)) / (192.0 + 0.2595 * sigma);
  const double heating_number = std::exp(-138.0 / sigma);
  const double preignition_heat = 250.0 + 1116.0 * moisture;

  const double c = 7.47 * std::exp(-0.133 * std::pow(sigma, 0.55));
  const double b = 0.02526 * std::pow(sigma, 0.54);
  const double e = 0.715 * std::exp(-3.59e-4 * sigma);

  SpreadTerms terms;
  terms.base = reaction_intensity * flux_ratio / (bulk_density * heating_number * preignition_heat);
  terms.wind_coef = c * std::pow(relative_packing, -e);
  terms.wind_exp = b;
  terms.slope_coef = 5.275 * std::pow(packing, -0.3);
  return terms;
}

double spread_rate(const SpreadTerms& terms, double midflame_wind_mph, double slope) noexcept {
  if (terms.base <= 0.0) return 0.0;
  const double wind_ft_min = midflame_wind_mph * kFeetPerMinutePerMph;
  const double wind_factor = wind_ft_min > 0.0 ? terms.wind_coef * std::pow(wind_ft_min, terms.wind_exp) : 0.0;
  const double slope_factor = terms.slope_coef * slope * slope;
  return terms.base * (1.0 + wind_factor + slope_factor);
}

double rothermel_ros(const FuelParams& fuel, double moisture, double midflame_wind_mph, double slope) {
  if (!(moisture >= 0.0)) throw std::invalid_argument("rothermel_ros: moisture must be >= 0");
  if (!(midflame_wind_mph >= 0.0)) throw std::invalid_argument("rothermel_ros: wind must be >= 0");
  if (!(slope >= 0.0)) throw std::invalid_argument("rothermel_ros: slope must be >= 0");
  if (!(fuel.sigma > 0.0) || !(fuel.delta > 0.0) || !(fuel.w0 >= 0.0) || !(fuel.mx > 0.0)) {
    throw std::invalid_argument("rothermel_ros: invalid fuel parameters");
  }
  return spread_rate(spread_terms(fuel, moisture), midflame_wind_mph, slope);
}

void ros_batch_serial(std::span<const RosInput> inputs, std::span<double> out) {
  if (out.size() != inputs.size()) throw std::invalid_argument("ros_batch: size mismatch");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const RosInput& in = inputs[i];
    out[i] = spread_rate(spread_terms(in.fuel, in.moisture), in.wind_mph, in.slope);
  }
}

void ros_batch(std::span<const RosInput> inputs, std::span<double> out) {
  if (out.size() != inputs.size()) throw std::invalid_argument("ros_batch: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const RosInput& in = inputs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = spread_rate(spread_terms(in.fuel, in.moisture), in.wind_mph, in.slope);
  }
}

}  // namespace emberline::rothermel
