#pragma once

#include <cstdint>
#include <vector>

#include "emberline/wind.hpp"

namespace emberline::fluid {

/// Periodic staggered (MAC) velocity. u(i, j) is the eastward component on
/// the west face of cell (i, j); v(i, j) is the southward (+row) component on
/// its north face. Unit grid spacing.
struct MacVelocity {
  int rows = 0;
  int cols = 0;
  std::vector<double> u;
  std::vector<double> v;

  MacVelocity() = default;
  MacVelocity(int r, int c) : rows(r), cols(c), u(static_cast<std::size_t>(r) * c, 0.0), v(u.size(), 0.0) {}

  [[nodiscard]] std::size_t idx(int i, int j) const noexcept {
    i = ((i % rows) + rows) % rows;
    j = ((j % cols) + cols) % cols;
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j);
  }
};

[[nodiscard]] std::vector<double> divergence(const MacVelocity& vel);
[[nodiscard]] double max_abs_divergence(const MacVelocity& vel);
/// Largest cell-centred speed.
[[nodiscard]] double max_speed(const MacVelocity& vel);

struct ProjectionStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Removes the divergent part of `vel` by solving the periodic pressure
/// Poisson problem. Conjugate gradients run to `tolerance` (relative
/// residual); Jacobi runs exactly `jacobi_iterations` sweeps.
ProjectionStats project(MacVelocity& vel, PressureSolver solver, int jacobi_iterations, double tolerance);

/// Semi-Lagrangian stable-fluids integrator.
class StableFluids {
 public:
  StableFluids(int rows, int cols, std::uint64_t seed, const FluidParams& params);

  void step();
  [[nodiscard]] const MacVelocity& velocity() const noexcept { return vel_; }
  [[nodiscard]] MacVelocity& velocity() noexcept { return vel_; }
  /// Cell-centred speed (mph) and direction of travel (degrees from north).
  [[nodiscard]] WindFrame frame() const;

 private:
  struct Vortex {
    double x, y, radius, strength;
  };

  void add_forcing();
  void advect();
  void diffuse();

  FluidParams params_;
  MacVelocity vel_;
  std::vector<Vortex> vortices_;
};

}  // namespace emberline::fluid
