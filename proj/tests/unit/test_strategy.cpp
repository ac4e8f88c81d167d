#include <doctest.h>

#include <cmath>
#include <map>

#include "emberline/errors.hpp"
#include "emberline/seeding.hpp"
#include "emberline/strategy.hpp"
#include "support/support.hpp"

using namespace emberline;
using emberline::testing::procedural_scenario;
using emberline::testing::uniform_scenario;

namespace {

EpisodeConfig line_config(Cell start = {0, 0}, int speed = 4) {
  EpisodeConfig c;
  c.agent_start = start;
  c.agent_speed = speed;
  return c;
}

CemParams small_cem() {
  CemParams p;
  p.population = 12;
  p.iterations = 4;
  p.segments = 2;
  p.seed_panel = 2;
  return p;
}

}  // namespace

TEST_CASE("random policy is uniform over the action space") {
  EpisodeConfig c;
  c.interactions = {Interaction::nothing, Interaction::fireline, Interaction::wetline};
  const std::size_t n = action_count(c);
  RandomPolicy p(12345);
  p.begin_episode(c, 8, 8);
  const int draws = 10000;
  std::vector<int> counts(n, 0);
  for (int k = 0; k < draws; ++k) ++counts[encode_action(c, p.act(Observation{}, k, {0, 0}))];
  const double expected = static_cast<double>(draws) / static_cast<double>(n);
  double chi2 = 0.0;
  for (int observed : counts) {
    chi2 += (observed - expected) * (observed - expected) / expected;
    CHECK(std::abs(observed - expected) <= 3.0 * std::sqrt(expected));
  }
  // 14 degrees of freedom; 36.12 is the 0.001 upper quantile.
  CHECK(chi2 < 36.12);
  RandomPolicy q(12345);
  q.begin_episode(c, 8, 8);
  for (int k = 0; k < 50; ++k) CHECK(q.act(Observation{}, k, {0, 0}) == p.act(Observation{}, k, {0, 0}));
}

TEST_CASE("scripted line walks to its row, lays a fireline to the edge, then idles") {
  const EpisodeConfig c = line_config({2, 0});
  ScriptedLinePolicy p(LineAxis::row, 4, Movement::right);
  p.begin_episode(c, 8, 6);
  const Action down{*movement_index(c, Movement::down), 0};
  const Action right_line{*movement_index(c, Movement::right), 1};
  CHECK(p.act({}, 0, {2, 0}) == down);
  CHECK(p.act({}, 1, {3, 0}) == down);
  CHECK(p.act({}, 2, {4, 0}) == Action{0, 1});
  for (int col = 0; col < 5; ++col) CHECK(p.act({}, 3 + col, {4, col}) == right_line);
  CHECK(p.act({}, 8, {4, 5}) == Action{0, 0});
  CHECK(p.act({}, 9, {4, 5}) == Action{0, 0});
  CHECK_THROWS_AS(ScriptedLinePolicy(LineAxis::row, 1, Movement::up), ConfigError);
  ScriptedLinePolicy off(LineAxis::col, 9, Movement::down);
  CHECK_THROWS_AS(off.begin_episode(c, 8, 6), ConfigError);
}

TEST_CASE("scripted line lays a complete row in the environment") {
  auto scenario = uniform_scenario(12, 12, 8, 0.0, 0.0, Cell{2, 6}, 200);
  EpisodeConfig c = line_config({6, 0}, 4);
  Environment env(scenario, c);
  auto policy = scripted_line_policy(LineAxis::row, 6, Movement::right)(0);
  const EpisodeResult r = run_episode(env, *policy, 0);
  CHECK(r.terminated);
  for (int col = 0; col < 12; ++col) CHECK(env.fire().at({6, col}) == CellStatus::fireline);
  for (int row = 7; row < 12; ++row) {
    for (int col = 0; col < 12; ++col) CHECK(env.fire().at({row, col}) == CellStatus::unburned);
  }
}

TEST_CASE("noop policy needs nothing actions") {
  EpisodeConfig c;
  c.movements = {Movement::up, Movement::down};
  NoopPolicy p;
  CHECK_THROWS_AS(p.begin_episode(c, 4, 4), ConfigError);
}

TEST_CASE("rasterized lines are 4-connected and hit both endpoints") {
  for (int k = 0; k < 400; ++k) {
    const Cell a{static_cast<int>(unit_hash(1, k) * 30), static_cast<int>(unit_hash(2, k) * 30)};
    const Cell b{static_cast<int>(unit_hash(3, k) * 30), static_cast<int>(unit_hash(4, k) * 30)};
    const auto line = rasterize_line(a, b);
    REQUIRE(!line.empty());
    CHECK(line.front() == a);
    CHECK(line.back() == b);
    CHECK(line.size() == static_cast<std::size_t>(std::abs(a.row - b.row) + std::abs(a.col - b.col) + 1));
    for (std::size_t i = 1; i < line.size(); ++i) {
      CHECK(std::abs(line[i].row - line[i - 1].row) + std::abs(line[i].col - line[i - 1].col) == 1);
    }
  }
  CHECK(rasterize_line({3, 3}, {3, 3}) == std::vector<Cell>{{3, 3}});
}

TEST_CASE("plans serialize, deduplicate cells and respect budgets") {
  FirelinePlan plan;
  plan.segments = {{{0, 0}, {0, 4}}, {{0, 4}, {3, 4}}};
  CHECK(plan.length() == 8);
  CHECK(plan_from_json(plan_to_json(plan)) == plan);
  CHECK_NOTHROW(validate_plan(plan, 5, 5, 8));
  CHECK_THROWS_AS(validate_plan(plan, 5, 5, 7), std::invalid_argument);
  CHECK_THROWS_AS(validate_plan(plan, 3, 5), OutOfRangeError);
  CHECK_THROWS_AS((void)plan_from_json("{"), ConfigError);
  CHECK_THROWS_AS((void)plan_from_json(R"({"segments": [[[0, 0]]]})"), ConfigError);
  CHECK_THROWS_AS((void)plan_from_json(R"({"segments": [[[0, "a"], [1, 1]]]})"), ConfigError);
  CHECK(plan_from_json(R"({"segments": []})").segments.empty());
}

TEST_CASE("plan policy places exactly the planned cells") {
  auto scenario = uniform_scenario(16, 16, 8, 0.0, 0.0, Cell{14, 14}, 400);
  FirelinePlan plan;
  plan.segments = {{{3, 2}, {3, 9}}, {{5, 9}, {9, 5}}};
  const EpisodeConfig c = line_config({0, 0}, 50);
  Environment env(scenario, c);
  PlanPolicy policy(plan);
  run_episode(env, policy, 0);
  const auto cells = plan.cells();
  for (Cell cell : cells) CHECK(env.fire().at(cell) == CellStatus::fireline);
  CHECK(damage_counts(env.fire()).mitigated == static_cast<std::int64_t>(cells.size()));
  Environment again(scenario, c);
  PlanPolicy p2(plan);
  run_episode(again, p2, 0);
  CHECK(again.fire() == env.fire());
}

TEST_CASE("summary statistics") {
  const Stat s = summarize({1.0, 2.0, 3.0, 6.0});
  CHECK(s.mean == 3.0);
  CHECK(s.std == doctest::Approx(std::sqrt(3.5)));
  CHECK(s.min == 1.0);
  CHECK(s.max == 6.0);
  const Stat one = summarize({4.0});
  CHECK(one.std == 0.0);
  CHECK(one.mean == 4.0);
}

TEST_CASE("evaluation is deterministic and its aggregates match the episodes") {
  auto scenario = procedural_scenario(5, 24, 24);
  const EpisodeConfig c = line_config({12, 0}, 2);
  const EvalReport a = evaluate_policy(random_policy(), scenario, c, 6, 99);
  const EvalReport b = evaluate_policy(random_policy(), scenario, c, 6, 99);
  CHECK(report_to_json(a) == report_to_json(b));
  REQUIRE(a.episodes.size() == 6);
  std::vector<double> areas;
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].episode_seed == derive_seed(99, "episode", i));
    areas.push_back(a.episodes[i].metrics.area_saved);
  }
  const Stat s = summarize(areas);
  CHECK(a.area_saved.mean == s.mean);
  CHECK(a.area_saved.min <= a.area_saved.mean);
  CHECK(a.area_saved.mean <= a.area_saved.max);
  const EvalReport single = evaluate_policy(noop_policy(), scenario, c, 1, 99);
  CHECK(single.episodes.size() == 1);
  CHECK(single.area_saved.std == 0.0);
  CHECK(single.reward_sum.mean == 0.0);
  BenchmarkCache cache(scenario);
  const EvalReport cached = evaluate_policy(random_policy(), scenario, c, 6, 99, &cache);
  CHECK(report_to_json(cached) == report_to_json(a));
}

TEST_CASE("cross-entropy search is reproducible with non-decreasing elite means") {
  auto scenario = procedural_scenario(8, 20, 20, Cell{10, 10});
  const EpisodeConfig c = line_config({10, 0}, 4);
  const OptimizeResult a = optimize_fireline(scenario, c, 30, small_cem(), 3);
  const OptimizeResult b = optimize_fireline(scenario, c, 30, small_cem(), 3);
  CHECK(a.plan == b.plan);
  CHECK(report_to_json(a.report) == report_to_json(b.report));
  REQUIRE(a.history.size() == 4);
  for (std::size_t i = 1; i < a.history.size(); ++i) {
    CHECK(a.history[i].elite_mean >= a.history[i - 1].elite_mean);
    CHECK(a.history[i].best >= a.history[i - 1].best);
  }
  CHECK(a.plan.length() <= 30);
  CHECK_NOTHROW(validate_plan(a.plan, 20, 20, 30));
  CHECK(a.report.area_saved.mean >= 0.0);
}

TEST_CASE("cross-entropy search with a one-cell budget and bad settings") {
  auto scenario = procedural_scenario(8, 16, 16, Cell{8, 8});
  const EpisodeConfig c = line_config({8, 0}, 4);
  CemParams p = small_cem();
  p.iterations = 2;
  const OptimizeResult r = optimize_fireline(scenario, c, 1, p, 1);
  CHECK(r.plan.length() <= 1);
  CHECK(r.report.area_saved.mean >= -1.0);
  CHECK_THROWS_AS((void)optimize_fireline(scenario, c, 0, p, 1), std::invalid_argument);
  p.population = 0;
  CHECK_THROWS((void)optimize_fireline(scenario, c, 10, p, 1));
}
