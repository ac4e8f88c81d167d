#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "emberline/seeding.hpp"
#include "emberline/strategy.hpp"

namespace emberline {

namespace {

using Params = std::vector<int>;  // r0, c0, r1, c1 per segment

struct Candidate {
  Params x;
  double score = -std::numeric_limits<double>::infinity();
  bool sampled_feasible = false;
};

double gaussian(std::uint64_t seed, std::uint64_t k) noexcept {
  const double u1 = 1.0 - unit_hash(seed, 2 * k);
  const double u2 = unit_hash(seed, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

FirelinePlan to_plan(const Params& x) {
  FirelinePlan plan;
  for (std::size_t s = 0; s + 3 < x.size(); s += 4) {
    plan.segments.emplace_back(Cell{x[s], x[s + 1]}, Cell{x[s + 2], x[s + 3]});
  }
  return plan;
}

// Drops trailing segments (collapsing them onto the last kept endpoint) and
// finally shortens the first one until the plan fits the budget.
void repair(Params& x, std::int64_t budget) {
  const std::size_t segments = x.size() / 4;
  for (std::size_t keep = segments; keep >= 1; --keep) {
    if (static_cast<std::int64_t>(to_plan(x).length()) <= budget) return;
    if (keep == 1) break;
    const std::size_t s = (keep - 1) * 4;
    const int r = x[s - 2];
    const int c = x[s - 1];
    x[s] = x[s + 2] = r;
    x[s + 1] = x[s + 3] = c;
  }
  const std::vector<Cell> line = rasterize_line(Cell{x[0], x[1]}, Cell{x[2], x[3]});
  const Cell end = line[static_cast<std::size_t>(std::min<std::int64_t>(budget, static_cast<std::int64_t>(line.size())) - 1)];
  x[2] = end.row;
  x[3] = end.col;
  for (std::size_t s = 4; s < x.size(); s += 4) {
    x[s] = x[s + 2] = end.row;
    x[s + 1] = x[s + 3] = end.col;
  }
}

}  // namespace

OptimizeResult optimize_fireline(std::shared_ptr<const Scenario> scenario, const EpisodeConfig& config,
                                 std::int64_t budget, const CemParams& params, std::uint64_t root_seed) {
  if (!scenario) throw std::invalid_argument("optimize_fireline: null scenario");
  if (budget < 1) throw std::invalid_argument("optimize_fireline: budget must be >= 1");
  if (params.population < 1 || params.iterations < 1 || params.segments < 1 || params.seed_panel < 1 ||
      params.max_resample < 0 || !(params.elite_fraction > 0.0 && params.elite_fraction <= 1.0) ||
      !(params.min_std >= 0.0) || !(params.init_std >= 0.0)) {
    throw std::invalid_argument("optimize_fireline: invalid search parameters");
  }
  config.validate(scenario->rows(), scenario->cols());

  const int rows = scenario->rows();
  const int cols = scenario->cols();
  const auto dim = static_cast<std::size_t>(params.segments) * 4;
  const int elite_count =
      std::clamp(static_cast<int>(std::lround(params.elite_fraction * params.population)), 1, params.population);
  const std::uint64_t opt_seed = derive_seed(root_seed, "optimizer");

  const Cell centre = scenario->fire.ignition.value_or(Cell{rows / 2, cols / 2});
  std::vector<double> mean(dim);
  std::vector<double> sd(dim, params.init_std > 0.0 ? params.init_std : std::max(rows, cols) / 4.0);
  for (std::size_t d = 0; d < dim; ++d) mean[d] = d % 2 == 0 ? centre.row : centre.col;

  BenchmarkCache cache(scenario);
  std::map<Params, double> memo;
  auto objective = [&](const Params& x) {
    const EvalReport r = evaluate_policy(plan_policy(to_plan(x)), scenario, config, params.seed_panel, root_seed, &cache);
    return r.area_saved.mean;
  };

  OptimizeResult result;
  std::vector<Candidate> elites;
  for (int it = 0; it < params.iterations; ++it) {
    std::vector<Candidate> pool = elites;
    int feasible = 0;
    for (int j = 0; j < params.population; ++j) {
      Candidate cand;
      cand.x.assign(dim, 0);
      for (int attempt = 0; attempt <= params.max_resample; ++attempt) {
        const std::uint64_t s = derive_seed(derive_seed(opt_seed, "iteration", static_cast<std::uint64_t>(it)),
                                            "candidate",
                                            static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(params.max_resample + 1) +
                                                static_cast<std::uint64_t>(attempt));
        for (std::size_t d = 0; d < dim; ++d) {
          const double hi = d % 2 == 0 ? rows - 1 : cols - 1;
          cand.x[d] = static_cast<int>(std::lround(std::clamp(mean[d] + sd[d] * gaussian(s, d), 0.0, hi)));
        }
        if (static_cast<std::int64_t>(to_plan(cand.x).length()) <= budget) {
          cand.sampled_feasible = true;
          break;
        }
      }
      if (cand.sampled_feasible) ++feasible;
      else repair(cand.x, budget);
      pool.push_back(std::move(cand));
    }

    std::vector<Params> pending;
    for (const Candidate& c : pool) {
      if (!memo.contains(c.x) && std::find(pending.begin(), pending.end(), c.x) == pending.end()) pending.push_back(c.x);
    }
    std::vector<double> scores(pending.size());
    std::vector<std::exception_ptr> errors(pending.size());
    const auto n = static_cast<std::ptrdiff_t>(pending.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      try {
        scores[static_cast<std::size_t>(k)] = objective(pending[static_cast<std::size_t>(k)]);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t k = 0; k < pending.size(); ++k) memo.emplace(pending[k], scores[k]);
    for (Candidate& c : pool) c.score = memo.at(c.x);

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pool[a].score > pool[b].score; });
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(elite_count), pool.size());
    elites.clear();
    for (std::size_t i = 0; i < k; ++i) elites.push_back(pool[order[i]]);

    CemIteration record;
    record.iteration = it;
    record.best = elites.front().score;
    record.feasible = feasible;
    for (const Candidate& e : elites) record.elite_mean += e.score;
    record.elite_mean /= static_cast<double>(elites.size());
    result.history.push_back(record);
    spdlog::debug("cem iteration {}: elite mean {:.3f}, best {:.3f}, feasible {}/{}", it, record.elite_mean,
                  record.best, feasible, params.population);

    for (std::size_t d = 0; d < dim; ++d) {
      double m = 0.0;
      for (const Candidate& e : elites) m += e.x[d];
      m /= static_cast<double>(elites.size());
      double v = 0.0;
      for (const Candidate& e : elites) v += (e.x[d] - m) * (e.x[d] - m);
      mean[d] = m;
      sd[d] = std::max(params.min_std, std::sqrt(v / static_cast<double>(elites.size())));
    }
  }

  result.plan = to_plan(elites.front().x);
  result.report = evaluate_policy(plan_policy(result.plan), scenario, config, params.seed_panel, root_seed, &cache);
  return result;
}

}  // namespace emberline
