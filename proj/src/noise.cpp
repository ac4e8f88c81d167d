#include "emberline/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "emberline/seeding.hpp"

namespace emberline {
namespace {

double lattice(std::uint64_t seed, std::int64_t x, std::int64_t y) {
  const auto key = mix64(static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL ^ mix64(static_cast<std::uint64_t>(y)));
  return unit_hash(seed, key);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double sample(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = smoothstep(x - fx);
  const double ty = smoothstep(y - fy);
  const double a = lattice(seed, ix, iy);
  const double b = lattice(seed, ix + 1, iy);
  const double c = lattice(seed, ix, iy + 1);
  const double d = lattice(seed, ix + 1, iy + 1);
  const double top = a + (b - a) * tx;
  const double bottom = c + (d - c) * tx;
  return top + (bottom - top) * ty;
}

}  // namespace

Grid<double> value_noise(std::uint64_t seed, int rows, int cols, const FractalNoise& params, double offset) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("value_noise: empty grid");
  if (params.octaves < 1) throw std::invalid_argument("value_noise: octaves must be >= 1");
  Grid<double> out(rows, cols, 0.0);
  const double span = static_cast<double>(std::max(rows, cols));
  double amplitude = 1.0;
  double frequency = params.frequency / span;
  for (int o = 0; o < params.octaves; ++o) {
    const std::uint64_t octave_seed = derive_seed(seed, "octave", static_cast<std::uint64_t>(o));
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        out(r, c) += amplitude * sample(octave_seed, (c + offset) * frequency, r * frequency);
      }
    }
    amplitude *= params.persistence;
    frequency *= 2.0;
  }
  const auto [lo, hi] = std::minmax_element(out.values().begin(), out.values().end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : out.values()) v = range > 0.0 ? (v - min) / range : 0.0;
  return out;
}

}  // namespace emberline
