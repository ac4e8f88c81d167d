#include "emberline/scenario.hpp"

#include <stdexcept>

#include "emberline/errors.hpp"

namespace emberline {

std::shared_ptr<const Scenario> make_scenario(LayerStack stack, WindField wind, FireConfig fire) {
  fire.validate();
  if (fire.ignition && !stack.contains(*fire.ignition)) {
    throw OutOfRangeError("scenario: ignition cell outside the grid");
  }
  if (wind.frame_count() > 0 && !wind.frame(0).speed.same_shape(stack.rows(), stack.cols())) {
    throw DimensionError("scenario: wind grid does not match the layer stack");
  }
  auto scenario = std::make_shared<Scenario>();
  scenario->slope = slope_aspect(stack);
  scenario->bounds = layer_bounds(stack, wind);
  scenario->model = SpreadModel::build(stack, scenario->slope, wind, fire);
  scenario->stack = std::move(stack);
  scenario->wind = std::move(wind);
  scenario->fire = fire;
  return scenario;
}

}  // namespace emberline
