#include "emberline/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emberline/config.hpp"
#include "emberline/episode_log.hpp"
#include "emberline/errors.hpp"
#include "emberline/http_api.hpp"
#include "emberline/logging.hpp"
#include "emberline/seeding.hpp"
#include "emberline/service.hpp"
#include "emberline/strategy.hpp"

namespace emberline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> frames_every;
  std::optional<std::string> policy;
  std::optional<int> episodes;
  std::string host = "127.0.0.1";
  int port = 8080;
};

RunConfig resolve(const Flags& f) {
  std::vector<fs::path> paths(f.configs.begin(), f.configs.end());
  RunConfig c = paths.empty() ? RunConfig{} : load_config(paths);
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output.dir = *f.out;
  if (f.frames_every) c.output.frames_every = *f.frames_every;
  if (f.policy) {
    c.strategy.policy = *f.policy == "noop"   ? PolicyKind::noop
                        : *f.policy == "random" ? PolicyKind::random
                        : *f.policy == "line"   ? PolicyKind::line
                                                : PolicyKind::plan;
  }
  if (f.episodes) c.strategy.episodes = *f.episodes;
  validate(c);
  return c;
}

std::string frame_name(std::int64_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fire_t%06lld.grid", static_cast<long long>(t));
  return buf;
}

Grid<std::int32_t> to_grid(const std::vector<CellStatus>& statuses, int rows, int cols) {
  Grid<std::int32_t> g(rows, cols);
  for (std::size_t i = 0; i < statuses.size(); ++i) g[i] = code(statuses[i]);
  return g;
}

void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json run_header(std::string_view command, const RunConfig& c) {
  return {{"command", command}, {"config", config_to_json(c)}};
}

json cell_json(Cell c) { return json::array({c.row, c.col}); }

int cmd_simulate(const RunConfig& c) {
  const fs::path out(c.output.dir);
  fs::create_directories(out);
  auto scenario = build_scenario(c);
  Environment env(scenario, c.environment);
  auto policy = make_policy(c)(derive_seed(c.seed, "policy", 0));
  const std::uint64_t episode_seed = derive_seed(c.seed, "episode", 0);

  std::ofstream log_file;
  std::optional<EpisodeLog> log;
  if (c.output.log) {
    log_file.open(out / "episode.jsonl", std::ios::trunc);
    if (!log_file) throw Error("cannot write " + (out / "episode.jsonl").string());
    json header = run_header("simulate", c);
    header["type"] = "run";
    log_file << header.dump() << '\n';
    log.emplace(log_file);
  }

  const int every = c.output.frames_every;
  auto write_frame = [&](const FireState& s) {
    if (every > 0 && s.t % every == 0) write_grid_file(out / "frames" / frame_name(s.t), s.status_grid());
  };

  env.set_observe(policy->needs_observation());
  Observation obs = env.reset(episode_seed);
  policy->begin_episode(env.config(), scenario->rows(), scenario->cols());
  if (log) log->begin(env, episode_seed);
  write_frame(env.fire());
  while (!env.done()) {
    StepResult r = env.step(policy->act(obs, env.agent_steps(), env.agent()));
    if (log) log->step(env, r);
    if (r.info.fire_advanced) write_frame(env.fire());
    obs = std::move(r.observation);
  }
  if (log) log->end(env);
  write_grid_file(out / "final.grid", env.fire().status_grid());

  const MetricSummary m = env.metrics();
  std::cout << "simulate: " << env.fire().t << " fire steps, area_saved " << m.area_saved << ", reward sum "
            << m.episode_reward_sum << "\n";
  return 0;
}

int cmd_benchmark(const RunConfig& c) {
  const fs::path out(c.output.dir);
  auto scenario = build_scenario(c);
  const Cell ignition = choose_ignition(*scenario, derive_seed(c.seed, "episode", 0));
  const BenchmarkTrace trace = run_benchmark(*scenario, ignition);

  json doc = run_header("benchmark", c);
  doc["ignition"] = cell_json(trace.ignition);
  doc["ignited"] = trace.ignited;
  doc["total_timesteps"] = trace.total_timesteps;
  doc["total_burned"] = trace.total_burned;
  doc["damaged_per_t"] = trace.damaged_per_t;
  doc["burned_per_t"] = trace.burned_per_t;
  write_json(out / "trace.json", doc);
  if (c.output.frames_every > 0) {
    for (std::size_t t = 0; t < trace.frames.size(); t += static_cast<std::size_t>(c.output.frames_every)) {
      write_grid_file(out / "frames" / frame_name(static_cast<std::int64_t>(t)),
                      to_grid(trace.frames[t], scenario->rows(), scenario->cols()));
    }
  }
  write_grid_file(out / "final.grid", trace.final_burned_map);
  std::cout << "benchmark: ignition [" << ignition.row << ", " << ignition.col << "], " << trace.total_timesteps
            << " timesteps, " << trace.total_burned << " burned\n";
  return 0;
}

int cmd_evaluate(const RunConfig& c) {
  auto scenario = build_scenario(c);
  const EvalReport report = evaluate_policy(make_policy(c), scenario, c.environment, c.strategy.episodes, c.seed);
  json doc = run_header("evaluate", c);
  doc["policy"] = policy_name(c.strategy.policy);
  doc["report"] = report_json(report);
  write_json(fs::path(c.output.dir) / "report.json", doc);
  std::cout << "evaluate: " << report.episodes.size() << " episodes, mean area_saved " << report.area_saved.mean
            << ", mean reward sum " << report.reward_sum.mean << "\n";
  return 0;
}

int cmd_optimize(const RunConfig& c) {
  auto scenario = build_scenario(c);
  const OptimizeResult result =
      optimize_fireline(scenario, c.environment, c.strategy.budget, c.strategy.optimizer, c.seed);
  const fs::path out(c.output.dir);
  fs::create_directories(out);
  {
    std::ofstream plan(out / "plan.json", std::ios::trunc);
    if (!plan) throw Error("cannot write " + (out / "plan.json").string());
    plan << plan_to_json(result.plan) << '\n';
  }
  json history = json::array();
  for (const CemIteration& it : result.history) {
    history.push_back(
        {{"iteration", it.iteration}, {"elite_mean", it.elite_mean}, {"best", it.best}, {"feasible", it.feasible}});
  }
  json doc = run_header("optimize", c);
  doc["plan"] = json::parse(plan_to_json(result.plan));
  doc["plan_cells"] = result.plan.length();
  doc["history"] = history;
  doc["report"] = report_json(result.report);
  write_json(out / "report.json", doc);
  std::cout << "optimize: plan of " << result.plan.length() << " cells, mean area_saved "
            << result.report.area_saved.mean << "\n";
  return 0;
}

int cmd_serve(const RunConfig& c, const Flags& f) {
  ServiceOptions options;
  options.defaults = c;
  if (f.out) options.log_dir = fs::path(*f.out) / "sessions";
  SessionManager manager(options);
  std::cout << "serving on http://" << f.host << ":" << f.port << std::endl;
  if (!serve(manager, f.host, f.port)) {
    std::cerr << "error: cannot listen on " << f.host << ":" << f.port << "\n";
    return 1;
  }
  return 0;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.configs, "config file; repeat to layer overrides (later wins)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "root seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--frames-every", f.frames_every, "export a status grid every N fire steps (0: off)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--policy", f.policy, "policy: noop, random, line, plan")
      ->check(CLI::IsMember({"noop", "random", "line", "plan"}));
  cmd->add_option("--episodes", f.episodes, "episodes to evaluate")->check(CLI::PositiveNumber);
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"emberline: grid wildfire simulation and mitigation harness"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* simulate = app.add_subcommand("simulate", "run one episode and write episode.jsonl and frames");
  CLI::App* benchmark = app.add_subcommand("benchmark", "run the unmitigated fire and write trace.json");
  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a policy over seeded episodes; writes report.json");
  CLI::App* optimize = app.add_subcommand("optimize", "search for a fireline plan; writes plan.json and report.json");
  CLI::App* serve_cmd = app.add_subcommand("serve", "start the interactive session service");
  for (CLI::App* cmd : {simulate, benchmark, evaluate, optimize, serve_cmd}) add_common(cmd, flags);
  serve_cmd->add_option("--host", flags.host, "bind address");
  serve_cmd->add_option("--port", flags.port, "bind port")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    init_logging();
    const RunConfig config = resolve(flags);
    if (simulate->parsed()) return cmd_simulate(config);
    if (benchmark->parsed()) return cmd_benchmark(config);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (optimize->parsed()) return cmd_optimize(config);
    return cmd_serve(config, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace emberline
