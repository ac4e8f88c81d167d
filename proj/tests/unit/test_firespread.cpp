#include <doctest.h>

#include <cmath>
#include <random>

#include "emberline/errors.hpp"
#include "emberline/fire.hpp"
#include "emberline/rothermel.hpp"
#include "emberline/scenario.hpp"
#include "emberline/seeding.hpp"
#include "oracle/rothermel_oracle.hpp"
#include "support/support.hpp"

using namespace emberline;

namespace {

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

FireState burn_to_quiescence(const Scenario& scenario, Cell ignition, bool reference = false) {
  FireState s(scenario.rows(), scenario.cols());
  ignite(s, ignition);
  while (is_active(s)) {
    if (reference) step_fire_reference(s, scenario.model);
    else step_fire(s, scenario.model);
  }
  return s;
}

}  // namespace

TEST_CASE("Rothermel rate agrees with the independent transcription") {
  const FuelCatalog catalog = catalog_standard();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int id = 1; id <= 13; ++id) {
    const oracle::TableRow& row = oracle::kAndersonTable[id - 1];
    const oracle::Fuel fuel = oracle::from_table(row.load, row.sigma, row.depth, row.mx);
    for (int k = 0; k < 40; ++k) {
      const double m = u(rng) * fuel.mx;
      const double w = 20.0 * u(rng);
      const double s = u(rng);
      CHECK(rel(rothermel::rothermel_ros(catalog.lookup(id).params, m, w, s), oracle::ros(fuel, m, w, s)) <= 1e-9);
    }
  }
}

TEST_CASE("Rothermel rate is zero without fuel or at extinction moisture") {
  const FuelCatalog catalog = catalog_standard();
  for (int id = 1; id <= 13; ++id) {
    FuelParams p = catalog.lookup(id).params;
    CHECK(rothermel::rothermel_ros(p, p.mx, 10.0, 0.5) == 0.0);
    CHECK(rothermel::rothermel_ros(p, p.mx + 0.1, 0.0, 0.0) == 0.0);
    CHECK(rothermel::rothermel_ros(p, 0.0, 0.0, 0.0) > 0.0);
    p.w0 = 0.0;
    CHECK(rothermel::rothermel_ros(p, 0.01, 10.0, 0.5) == 0.0);
  }
}

TEST_CASE("Rothermel rate grows with wind and slope and falls with moisture") {
  const FuelParams p = catalog_standard().lookup(2).params;
  CHECK(rothermel::rothermel_ros(p, 0.05, 5.0, 0.0) > rothermel::rothermel_ros(p, 0.05, 0.0, 0.0));
  CHECK(rothermel::rothermel_ros(p, 0.05, 0.0, 0.4) > rothermel::rothermel_ros(p, 0.05, 0.0, 0.0));
  CHECK(rothermel::rothermel_ros(p, 0.02, 0.0, 0.0) > rothermel::rothermel_ros(p, 0.10, 0.0, 0.0));
  CHECK_THROWS_AS((void)rothermel::rothermel_ros(p, -0.1, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)rothermel::rothermel_ros(p, 0.1, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)rothermel::rothermel_ros(p, 0.1, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("batched rate kernel matches its serial reference bit for bit") {
  const FuelCatalog catalog = catalog_standard();
  std::vector<rothermel::RosInput> in;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const int id = static_cast<int>(i % 14);
    in.push_back({catalog.lookup(id).params, 0.3 * unit_hash(1, i), 20.0 * unit_hash(2, i), unit_hash(3, i)});
  }
  std::vector<double> a(in.size()), b(in.size());
  rothermel::ros_batch(in, a);
  rothermel::ros_batch_serial(in, b);
  CHECK(a == b);
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(rothermel::ros_batch(in, wrong), std::invalid_argument);
}

TEST_CASE("ignition and mitigation rules") {
  FireState s(4, 4);
  CHECK(apply_mitigation(s, {0, 0}, MitigationKind::fireline));
  CHECK(s.at({0, 0}) == CellStatus::fireline);
  CHECK_FALSE(apply_mitigation(s, {0, 0}, MitigationKind::wetline));
  CHECK_FALSE(ignite(s, {0, 0}));
  CHECK(ignite(s, {2, 2}));
  CHECK_FALSE(ignite(s, {2, 2}));
  CHECK_FALSE(apply_mitigation(s, {2, 2}, MitigationKind::scratchline));
  CHECK_THROWS_AS(ignite(s, {4, 0}), OutOfRangeError);
  CHECK_THROWS_AS(apply_mitigation(s, {-1, 0}, MitigationKind::fireline), OutOfRangeError);
  CHECK(is_active(s));
  CHECK(damage_counts(s) == DamageCounts{0, 1, 1});
  CHECK(parse_mitigation("wetline") == MitigationKind::wetline);
  CHECK_THROWS_AS((void)parse_mitigation("moat"), std::invalid_argument);
  for (auto k : {MitigationKind::fireline, MitigationKind::scratchline, MitigationKind::wetline}) {
    CHECK(parse_mitigation(mitigation_name(k)) == k);
    CHECK(is_mitigation(status_of(k)));
  }
}

TEST_CASE("status codes follow the published legend") {
  CHECK(code(CellStatus::unburned) == 0);
  CHECK(code(CellStatus::burning) == 1);
  CHECK(code(CellStatus::burned) == 2);
  CHECK(code(CellStatus::fireline) == 3);
  CHECK(code(CellStatus::scratchline) == 4);
  CHECK(code(CellStatus::wetline) == 5);
  CHECK(kAgentCode == 6);
  CHECK(is_ignitable(CellStatus::wetline));
  CHECK(is_ignitable(CellStatus::scratchline));
  CHECK_FALSE(is_ignitable(CellStatus::fireline));
}

TEST_CASE("parallel step matches the serial reference on procedural worlds") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto scenario = emberline::testing::procedural_scenario(seed, 40, 48, std::nullopt, 3.0 * static_cast<double>(seed),
                                                            45.0 * static_cast<double>(seed));
    FireState a(40, 48);
    for (int k = 0; k < 30; ++k) {
      const Cell c{static_cast<int>(unit_hash(seed, 2 * k) * 40), static_cast<int>(unit_hash(seed, 2 * k + 1) * 48)};
      apply_mitigation(a, c, static_cast<MitigationKind>(k % 3));
    }
    ignite(a, {20, 24});
    FireState b = a;
    int steps = 0;
    while (is_active(a) && steps < 2000) {
      step_fire(a, scenario->model);
      step_fire_reference(b, scenario->model);
      REQUIRE(a == b);
      ++steps;
    }
    CHECK_FALSE(is_active(b));
  }
}

TEST_CASE("fire moves at most one cell per step and never unburns") {
  auto scenario = emberline::testing::uniform_scenario(32, 32, 4, 20.0, 30.0, Cell{16, 16});
  FireState s(32, 32);
  ignite(s, {16, 16});
  std::vector<CellStatus> prev = s.status;
  while (is_active(s)) {
    step_fire(s, scenario->model);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        const std::size_t i = s.index({r, c});
        if (s.status[i] == CellStatus::burning || s.status[i] == CellStatus::burned) {
          CHECK(std::max(std::abs(r - 16), std::abs(c - 16)) <= s.t);
        }
        if (prev[i] == CellStatus::burned) CHECK(s.status[i] == CellStatus::burned);
        if (prev[i] == CellStatus::burning) CHECK((s.status[i] == CellStatus::burning || s.status[i] == CellStatus::burned));
      }
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (double p : s.progress[i]) CHECK(p >= 0.0);
    }
    prev = s.status;
  }
}

TEST_CASE("burning cells burn out after the configured duration") {
  auto scenario = emberline::testing::uniform_scenario(3, 3, 0, 0.0, 0.0, Cell{1, 1}, 7);
  FireState s(3, 3);
  ignite(s, {1, 1});
  for (int k = 0; k < 6; ++k) {
    step_fire(s, scenario->model);
    CHECK(s.at({1, 1}) == CellStatus::burning);
  }
  step_fire(s, scenario->model);
  CHECK(s.at({1, 1}) == CellStatus::burned);
  CHECK_FALSE(is_active(s));
  CHECK(damage_counts(s) == DamageCounts{1, 0, 0});
}

TEST_CASE("non-burnable fuel and firelines stop the fire") {
  Grid<int> fuel(9, 9, 1);
  for (int r = 0; r < 9; ++r) fuel(r, 5) = kNonBurnableFuel;
  auto scenario = make_scenario(LayerStack::bind(fuel, Grid<double>(9, 9), 30.0, std::nullopt, shared_standard_catalog()),
                                WindField::constant(10.0, 90.0), FireConfig{});
  const FireState s = burn_to_quiescence(*scenario, {4, 1});
  for (int r = 0; r < 9; ++r) {
    for (int c = 5; c < 9; ++c) CHECK(s.at({r, c}) == CellStatus::unburned);
  }
  CHECK(s.at({4, 4}) == CellStatus::burned);
}

TEST_CASE("wetlines and scratchlines slow the fire without stopping it") {
  // Slow litter fuel so crossing a cell takes several steps.
  auto scenario = emberline::testing::uniform_scenario(1, 12, 8, 2.0, 90.0, Cell{0, 0}, 100000);
  auto arrival = [&](std::optional<MitigationKind> kind) {
    FireState s(1, 12);
    if (kind) {
      for (int c = 1; c < 12; ++c) apply_mitigation(s, {0, c}, *kind);
    }
    ignite(s, {0, 0});
    while (s.at({0, 11}) != CellStatus::burning && s.t < 200000) step_fire(s, scenario->model);
    return s.t;
  };
  const auto bare = arrival(std::nullopt);
  const auto scratch = arrival(MitigationKind::scratchline);
  const auto wet = arrival(MitigationKind::wetline);
  CHECK(bare < scratch);
  CHECK(scratch < wet);
  CHECK(wet < 200000);
  FireState s(1, 12);
  for (int c = 1; c < 12; ++c) apply_mitigation(s, {0, c}, MitigationKind::fireline);
  ignite(s, {0, 0});
  while (is_active(s)) step_fire(s, scenario->model);
  CHECK(damage_counts(s) == DamageCounts{1, 0, 11});
}

TEST_CASE("spread model rates point along wind and upslope") {
  auto windy = emberline::testing::uniform_scenario(5, 5, 1, 8.0, 90.0, Cell{2, 2});
  const int east = 2;
  const int west = 6;
  CHECK(windy->model.rate(0, {2, 2}, east) > windy->model.rate(0, {2, 2}, west));
  CHECK(windy->model.rate(0, {2, 2}, 0) == doctest::Approx(windy->model.rate(0, {2, 2}, 4)));
  auto sloped = emberline::testing::uniform_scenario(5, 5, 1, 0.0, 0.0, Cell{2, 2}, 30, 20.0, 0.0);
  const int north = 0;
  const int south = 4;
  CHECK(sloped->model.rate(0, {2, 2}, north) > sloped->model.rate(0, {2, 2}, south));
  CHECK(windy->model.crossing(1) == doctest::Approx(30.0 * std::sqrt(2.0)));
  CHECK(windy->model.crossing(2) == 30.0);
}

TEST_CASE("scenario validation rejects bad fire settings and misplaced ignition") {
  const LayerStack stack = emberline::testing::uniform_stack(4, 4, 1);
  FireConfig f;
  f.ignition = Cell{4, 0};
  CHECK_THROWS((void)make_scenario(stack, WindField::constant(1, 0), f));
  f.ignition.reset();
  f.max_fire_duration = 0;
  CHECK_THROWS((void)make_scenario(stack, WindField::constant(1, 0), f));
  f = FireConfig{};
  f.dt = 0.0;
  CHECK_THROWS((void)make_scenario(stack, WindField::constant(1, 0), f));
  const WindField mismatched = generate_wind_noise(1, 5, 4, 2, NoiseWindParams{});
  CHECK_THROWS((void)make_scenario(stack, mismatched, FireConfig{}));
}

TEST_CASE("step_fire rejects a state of the wrong shape") {
  auto scenario = emberline::testing::uniform_scenario(4, 4, 1, 0.0, 0.0, Cell{0, 0});
  FireState s(5, 4);
  CHECK_THROWS_AS(step_fire(s, scenario->model), DimensionError);
  CHECK_THROWS_AS(step_fire_reference(s, scenario->model), DimensionError);
}

TEST_CASE("convenience step builds the model on the fly") {
  const LayerStack stack = emberline::testing::uniform_stack(8, 8, 2);
  const WindField wind = WindField::constant(4.0, 180.0);
  auto scenario = make_scenario(stack, wind, FireConfig{});
  FireState a(8, 8);
  ignite(a, {0, 4});
  FireState b = a;
  for (int k = 0; k < 10; ++k) {
    step_fire(a, stack, wind, FireConfig{});
    step_fire(b, scenario->model);
  }
  CHECK(a == b);
}

TEST_CASE("time-varying wind uses the frame for the current step") {
  const LayerStack stack = emberline::testing::uniform_stack(6, 6, 1);
  const WindField wind = generate_wind_noise(3, 6, 6, 4, NoiseWindParams{});
  auto scenario = make_scenario(stack, wind, FireConfig{});
  CHECK(scenario->model.table_for(2).data() != scenario->model.table_for(0).data());
  CHECK(scenario->model.table_for(50).data() == scenario->model.table_for(3).data());
}

TEST_CASE("lowering any attenuation multiplier never burns more land") {
  const LayerStack stack = emberline::testing::uniform_stack(16, 16, 2, 3.0, 90.0);
  const WindField wind = WindField::constant(6.0, 60.0);
  const double levels[] = {0.0, 0.5, 1.0};
  auto burned = [&](double global, double scratch, double wet) {
    FireConfig f;
    f.attenuation = global;
    f.mitigation.scratchline = scratch;
    f.mitigation.wetline = wet;
    f.max_fire_duration = 12;
    auto scenario = make_scenario(stack, wind, f);
    FireState s(16, 16);
    for (int r = 2; r < 14; ++r) {
      apply_mitigation(s, {r, 10}, MitigationKind::scratchline);
      apply_mitigation(s, {r, 4}, MitigationKind::wetline);
    }
    ignite(s, {8, 7});
    while (is_active(s)) step_fire(s, scenario->model);
    return damage_counts(s).burned;
  };
  std::int64_t table[3][3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) table[a][b][c] = burned(levels[a], levels[b], levels[c]);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        if (a > 0) CHECK(table[a - 1][b][c] <= table[a][b][c]);
        if (b > 0) CHECK(table[a][b - 1][c] <= table[a][b][c]);
        if (c > 0) CHECK(table[a][b][c - 1] <= table[a][b][c]);
      }
    }
  }
  CHECK(table[0][0][0] == 1);
  CHECK(table[2][2][2] > table[2][0][0]);
}

TEST_CASE("cell counts are conserved, burned only grows and firelines never burn") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto scenario = emberline::testing::procedural_scenario(seed, 30, 30, std::nullopt, 8.0, 120.0);
    FireState s(30, 30);
    std::vector<Cell> lines;
    for (int c = 0; c < 30; c += 2) lines.push_back({static_cast<int>(seed * 7 % 30), c});
    for (Cell c : lines) apply_mitigation(s, c, MitigationKind::fireline);
    ignite(s, {15, 15});
    std::int64_t burned_before = 0;
    while (is_active(s)) {
      step_fire(s, scenario->model);
      const DamageCounts d = damage_counts(s);
      std::int64_t unburned = 0;
      for (CellStatus st : s.status) unburned += st == CellStatus::unburned;
      CHECK(d.burned + d.burning + d.mitigated + unburned == 900);
      CHECK(d.burned >= burned_before);
      burned_before = d.burned;
      for (Cell c : lines) CHECK(s.at(c) == CellStatus::fireline);
    }
  }
}

TEST_CASE("identical inputs give identical fire histories") {
  auto a = emberline::testing::procedural_scenario(21, 24, 24, Cell{12, 12}, 7.0, 200.0);
  auto b = emberline::testing::procedural_scenario(21, 24, 24, Cell{12, 12}, 7.0, 200.0);
  FireState x(24, 24), y(24, 24);
  ignite(x, {12, 12});
  ignite(y, {12, 12});
  while (is_active(x)) {
    step_fire(x, a->model);
    step_fire(y, b->model);
    REQUIRE(x == y);
    REQUIRE(x.progress == y.progress);
  }
}
