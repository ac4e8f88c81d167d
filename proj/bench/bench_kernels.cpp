// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include <memory>

#include "emberline/fire.hpp"
#include "emberline/rothermel.hpp"
#include "emberline/scenario.hpp"
#include "emberline/seeding.hpp"
#include "emberline/terrain.hpp"

namespace {

using namespace emberline;

std::shared_ptr<const Scenario> world(int n) {
  ProceduralParams params;
  params.nonburnable_fraction = 0.05;
  FireConfig fire;
  fire.max_fire_duration = 1000000;
  return make_scenario(generate_procedural(11, n, n, params), WindField::constant(6.0, 45.0), fire);
}

// A fire several dozen steps in, so the active window is non-trivial.
FireState warmed(const Scenario& s) {
  FireState state(s.rows(), s.cols());
  ignite(state, {s.rows() / 2, s.cols() / 2});
  for (int k = 0; k < 60; ++k) step_fire_reference(state, s.model);
  return state;
}

template <void (*Step)(FireState&, const SpreadModel&)>
void BM_step(benchmark::State& bs) {
  const auto scenario = world(static_cast<int>(bs.range(0)));
  const FireState start = warmed(*scenario);
  FireState state = start;
  for (auto _ : bs) {
    bs.PauseTiming();
    state = start;
    bs.ResumeTiming();
    Step(state, scenario->model);
    benchmark::DoNotOptimize(state.status.data());
  }
  bs.SetItemsProcessed(bs.iterations() * static_cast<std::int64_t>(state.size()));
}

void step_parallel(FireState& s, const SpreadModel& m) { step_fire(s, m); }
void step_serial(FireState& s, const SpreadModel& m) { step_fire_reference(s, m); }

std::vector<rothermel::RosInput> ros_inputs(std::size_t n) {
  const FuelCatalog catalog = catalog_standard();
  std::vector<rothermel::RosInput> in;
  in.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.push_back({catalog.lookup(static_cast<int>(1 + i % 13)).params, 0.2 * unit_hash(1, i), 20.0 * unit_hash(2, i),
                  unit_hash(3, i)});
  }
  return in;
}

template <bool Parallel>
void BM_ros(benchmark::State& bs) {
  const auto in = ros_inputs(static_cast<std::size_t>(bs.range(0)));
  std::vector<double> out(in.size());
  for (auto _ : bs) {
    if constexpr (Parallel) rothermel::ros_batch(in, out);
    else rothermel::ros_batch_serial(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  bs.SetItemsProcessed(bs.iterations() * static_cast<std::int64_t>(in.size()));
}

}  // namespace

BENCHMARK(BM_step<step_parallel>)->Name("step_fire/openmp")->Arg(128)->Arg(512);
BENCHMARK(BM_step<step_serial>)->Name("step_fire/reference")->Arg(128)->Arg(512);
BENCHMARK(BM_ros<true>)->Name("ros_batch/openmp")->Arg(1 << 16);
BENCHMARK(BM_ros<false>)->Name("ros_batch/serial")->Arg(1 << 16);

BENCHMARK_MAIN();
