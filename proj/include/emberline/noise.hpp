#pragma once

#include <cstdint>

#include "emberline/grid.hpp"

namespace emberline {

struct FractalNoise {
  int octaves = 4;
  double persistence = 0.5;
  double frequency = 4.0;  // lattice cells across the longer grid edge, first octave
};

/// Fractal value noise on a rows x cols raster, normalized to span [0, 1]
/// exactly (a constant field maps to all zeros). `offset` shifts the sample
/// lattice in x, which is how time-varying fields drift.
[[nodiscard]] Grid<double> value_noise(std::uint64_t seed, int rows, int cols, const FractalNoise& params,
                                       double offset = 0.0);

}  // namespace emberline
