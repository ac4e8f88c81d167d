#include <doctest.h>

#include <array>
#include <stdexcept>

#include "emberline/reward.hpp"

using namespace emberline;

TEST_CASE("damage totals") {
  constexpr DamageSnapshot s{3, 2, 4, 7, 1};
  static_assert(damaged_sim(s) == 9);
  static_assert(damaged_bench(s) == 8);
  CHECK(damaged_sim(DamageSnapshot{}) == 0);
}

TEST_CASE("benchmark damage holds its final value past the trace") {
  const std::array<std::int64_t, 4> trace{1, 3, 6, 9};
  CHECK(damaged_bench(trace, 0) == 1);
  CHECK(damaged_bench(trace, 2) == 6);
  CHECK(damaged_bench(trace, 3) == 9);
  CHECK(damaged_bench(trace, 100) == 9);
  CHECK(damaged_bench(trace, -5) == 1);
  CHECK(damaged_bench(std::span<const std::int64_t>{}, 3) == 0);
}

TEST_CASE("step reward compares new benchmark damage with new live damage") {
  const DamageSnapshot prev{0, 1, 0, 0, 1};
  SUBCASE("live spreads slower than the benchmark") {
    const DamageSnapshot cur{1, 2, 0, 1, 5};
    CHECK(step_reward(prev, cur, 50) == doctest::Approx((5.0 - 2.0) / 50.0));
  }
  SUBCASE("mitigated cells count as damage") {
    const DamageSnapshot cur{0, 1, 4, 0, 3};
    CHECK(step_reward(prev, cur, 10) == doctest::Approx((2.0 - 4.0) / 10.0));
  }
  SUBCASE("identical progress is neutral") {
    const DamageSnapshot cur{1, 3, 0, 1, 3};
    CHECK(step_reward(prev, cur, 20) == 0.0);
  }
  CHECK(step_reward(prev, DamageSnapshot{9, 9, 9, 0, 0}, 0) == 0.0);
}

TEST_CASE("mitigation bonus scales with grid area") {
  CHECK(mitigation_bonus(1) == 0.25);
  CHECK(mitigation_bonus(100) == doctest::Approx(0.0025));
  CHECK(mitigation_bonus(128 * 128) == doctest::Approx(0.25 / 16384.0));
  CHECK_THROWS_AS((void)mitigation_bonus(0), std::invalid_argument);
}

TEST_CASE("metric arithmetic on hand-computed values") {
  CHECK(area_saved(30, 10, 100) == 60.0);
  CHECK(area_saved(100, 0, 100) == 0.0);
  CHECK(area_saved(90, 20, 100) == -10.0);
  CHECK(timesteps_saved(20, 50) == 30.0);
  CHECK(timesteps_saved(60, 50) == -10.0);
  CHECK_THROWS_AS((void)timesteps_saved(0, 5), std::invalid_argument);
  CHECK(burn_rate(40, 10, 25) == 200.0);
  CHECK(burn_rate(0, 0, 7) == 0.0);
  CHECK_THROWS_AS((void)burn_rate(1, 1, 0), std::invalid_argument);
  CHECK(burn_rate_reduction(150.0, 200.0) == 50.0);
  CHECK(burn_rate_reduction(250.0, 200.0) == -50.0);
  CHECK_THROWS_AS((void)burn_rate_reduction(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("an unmitigated episode scores zero on every metric") {
  const std::int64_t burned = 77;
  const std::int64_t t = 31;
  CHECK(area_saved(burned, 0, burned) == 0.0);
  CHECK(timesteps_saved(t, t) == 0.0);
  CHECK(burn_rate_reduction(burn_rate(burned, 0, t), burn_rate(burned, 0, t)) == 0.0);
}
