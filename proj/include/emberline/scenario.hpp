#pragma once

#include <memory>

#include "emberline/fire.hpp"
#include "emberline/terrain.hpp"
#include "emberline/wind.hpp"

namespace emberline {

/// Everything one fire needs: world layers, wind, fire settings and the
/// derived spread kernel. Immutable; share it across concurrent rollouts.
struct Scenario {
  LayerStack stack;
  WindField wind;
  FireConfig fire;
  SlopeField slope;
  LayerBounds bounds;
  SpreadModel model;

  [[nodiscard]] int rows() const noexcept { return stack.rows(); }
  [[nodiscard]] int cols() const noexcept { return stack.cols(); }
  [[nodiscard]] bool burnable(Cell c) const { return stack.catalog().lookup(stack.fuel_id().at(c)).burnable(); }
};

/// Validates `fire` (including an explicit ignition cell lying on the grid)
/// and derives slope, bounds and spread tables.
[[nodiscard]] std::shared_ptr<const Scenario> make_scenario(LayerStack stack, WindField wind, FireConfig fire);

}  // namespace emberline
