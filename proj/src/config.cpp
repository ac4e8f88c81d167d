#include "emberline/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "emberline/errors.hpp"
#include "emberline/seeding.hpp"

namespace emberline {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

std::string type_name(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: return "a mapping";
    case YAML::NodeType::Sequence: return "a list";
    case YAML::NodeType::Null: return "null";
    default: return "'" + n.Scalar() + "'";
  }
}

// Read-once view of one mapping; finish() rejects keys nobody read.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(path_, "expected a mapping, got " + type_name(node_));
    }
  }

  [[nodiscard]] std::string key_path(std::string_view key) const { return join_path(path_, key); }

  YAML::Node take(std::string_view key) {
    seen_.insert(std::string(key));
    // Const lookups of absent keys yield undefined nodes; YAML::Node() would be null.
    static const YAML::Node empty(YAML::NodeType::Map);
    const YAML::Node& map = node_ && node_.IsMap() ? node_ : empty;
    return map[std::string(key)];
  }

  template <class T>
  void read(std::string_view key, T& out) {
    const YAML::Node n = take(key);
    if (!n) return;
    out = scalar<T>(n, key_path(key));
  }

  Section child(std::string_view key) { return Section(take(key), key_path(key)); }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.contains(key)) throw ConfigError(key_path(key), "unknown key");
    }
  }

  template <class T>
  static T scalar(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected a scalar, got " + type_name(n));
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      if constexpr (std::is_same_v<T, bool>) throw ConfigError(path, "expected true or false, got " + type_name(n));
      else if constexpr (std::is_integral_v<T>) throw ConfigError(path, "expected an integer, got " + type_name(n));
      else if constexpr (std::is_floating_point_v<T>) throw ConfigError(path, "expected a number, got " + type_name(n));
      else throw ConfigError(path, "expected a string, got " + type_name(n));
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

Cell read_cell(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 2) throw ConfigError(path, "expected [row, col], got " + type_name(n));
  return Cell{Section::scalar<int>(n[0], path + "[0]"), Section::scalar<int>(n[1], path + "[1]")};
}

template <class T, class Parse>
std::vector<T> read_names(const YAML::Node& n, const std::string& path, Parse parse) {
  if (!n.IsSequence()) throw ConfigError(path, "expected a list, got " + type_name(n));
  std::vector<T> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    try {
      out.push_back(parse(Section::scalar<std::string>(n[i], item)));
    } catch (const ConfigError& e) {
      if (e.key_path() == item) throw;
      throw ConfigError(item, e.what());
    }
  }
  return out;
}

template <class E, std::size_t N>
E read_enum(const YAML::Node& n, const std::string& path, const std::array<std::pair<std::string_view, E>, N>& table) {
  const auto s = Section::scalar<std::string>(n, path);
  std::string allowed;
  for (const auto& [name, value] : table) {
    if (name == s) return value;
    allowed += allowed.empty() ? "" : ", ";
    allowed += name;
  }
  throw ConfigError(path, "unknown value '" + s + "' (expected one of " + allowed + ")");
}

constexpr std::array<std::pair<std::string_view, TerrainSource>, 2> kSources{
    {{"procedural", TerrainSource::procedural}, {"files", TerrainSource::files}}};
constexpr std::array<std::pair<std::string_view, WindMode>, 3> kWindModes{
    {{"constant", WindMode::constant}, {"generated", WindMode::generated}, {"fluid", WindMode::fluid}}};
constexpr std::array<std::pair<std::string_view, PressureSolver>, 2> kSolvers{
    {{"cg", PressureSolver::conjugate_gradient}, {"jacobi", PressureSolver::jacobi}}};
constexpr std::array<std::pair<std::string_view, PolicyKind>, 4> kPolicies{
    {{"noop", PolicyKind::noop}, {"random", PolicyKind::random}, {"line", PolicyKind::line}, {"plan", PolicyKind::plan}}};
constexpr std::array<std::pair<std::string_view, LineAxis>, 2> kAxes{{{"row", LineAxis::row}, {"col", LineAxis::col}}};

template <class E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

void read_terrain(Section s, TerrainConfig& t) {
  if (auto n = s.take("source")) t.source = read_enum(n, s.key_path("source"), kSources);
  s.read("bundle", t.bundle);
  s.read("rows", t.rows);
  s.read("cols", t.cols);
  s.read("cell_size", t.cell_size);
  if (auto n = s.take("origin")) {
    const std::string path = s.key_path("origin");
    if (n.IsNull()) {
      t.origin.reset();
    } else if (n.IsSequence() && n.size() == 2) {
      t.origin = GeoOrigin{Section::scalar<double>(n[0], path + "[0]"), Section::scalar<double>(n[1], path + "[1]")};
    } else {
      throw ConfigError(path, "expected [lat, lon] or null, got " + type_name(n));
    }
  }
  s.read("octaves", t.octaves);
  s.read("persistence", t.persistence);
  s.read("frequency", t.frequency);
  s.read("elevation_min", t.elevation_min);
  s.read("elevation_max", t.elevation_max);
  if (auto n = s.take("fuel_ids")) {
    const std::string path = s.key_path("fuel_ids");
    if (!n.IsSequence()) throw ConfigError(path, "expected a list of fuel ids");
    t.fuel_ids.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      t.fuel_ids.push_back(Section::scalar<int>(n[i], path + "[" + std::to_string(i) + "]"));
    }
  }
  s.read("fuel_frequency", t.fuel_frequency);
  s.read("nonburnable_fraction", t.nonburnable_fraction);
  s.finish();
}

void read_wind(Section s, WindConfig& w) {
  if (auto n = s.take("mode")) w.mode = read_enum(n, s.key_path("mode"), kWindModes);
  s.read("speed", w.speed);
  s.read("direction", w.direction);
  s.read("steps", w.steps);
  s.read("variation", w.variation);
  s.read("direction_spread", w.direction_spread);
  s.read("frequency", w.frequency);
  s.read("drift", w.drift);
  s.read("viscosity", w.viscosity);
  s.read("forcing", w.forcing);
  s.read("vortices", w.vortices);
  s.read("solver_dt", w.solver_dt);
  if (auto n = s.take("pressure_solver")) w.pressure_solver = read_enum(n, s.key_path("pressure_solver"), kSolvers);
  s.read("pressure_iterations", w.pressure_iterations);
  s.read("diffusion_iterations", w.diffusion_iterations);
  s.finish();
}

void read_fire(Section s, FireConfig& f) {
  s.read("dt", f.dt);
  s.read("attenuation", f.attenuation);
  s.read("scratchline", f.mitigation.scratchline);
  s.read("wetline", f.mitigation.wetline);
  s.read("max_fire_duration", f.max_fire_duration);
  s.read("dead_fuel_moisture", f.dead_fuel_moisture);
  if (auto n = s.take("ignition")) {
    if (n.IsScalar() && n.Scalar() == "random") f.ignition.reset();
    else if (n.IsSequence()) f.ignition = read_cell(n, s.key_path("ignition"));
    else throw ConfigError(s.key_path("ignition"), "expected 'random' or [row, col], got " + type_name(n));
  }
  s.read("step_cap", f.step_cap);
  s.finish();
}

void read_environment(Section s, EpisodeConfig& e) {
  if (auto n = s.take("agent_start")) e.agent_start = read_cell(n, s.key_path("agent_start"));
  s.read("agent_speed", e.agent_speed);
  if (auto n = s.take("movements")) {
    e.movements = read_names<Movement>(n, s.key_path("movements"), [](const std::string& v) { return parse_movement(v); });
  }
  if (auto n = s.take("interactions")) {
    e.interactions =
        read_names<Interaction>(n, s.key_path("interactions"), [](const std::string& v) { return parse_interaction(v); });
  }
  if (auto n = s.take("attributes")) {
    e.attributes =
        read_names<Attribute>(n, s.key_path("attributes"), [](const std::string& v) { return parse_attribute(v); });
  }
  s.read("normalize", e.normalize);
  s.read("max_agent_steps", e.max_agent_steps);
  s.finish();
}

void read_strategy(Section s, StrategyConfig& st) {
  if (auto n = s.take("policy")) st.policy = read_enum(n, s.key_path("policy"), kPolicies);
  s.read("episodes", st.episodes);
  {
    Section line = s.child("line");
    if (auto n = line.take("axis")) st.line.axis = read_enum(n, line.key_path("axis"), kAxes);
    line.read("index", st.line.index);
    if (auto n = line.take("direction")) {
      st.line.direction = parse_movement(Section::scalar<std::string>(n, line.key_path("direction")));
    }
    line.finish();
  }
  s.read("plan", st.plan);
  s.read("budget", st.budget);
  {
    Section opt = s.child("optimizer");
    CemParams& p = st.optimizer;
    opt.read("population", p.population);
    opt.read("elite_fraction", p.elite_fraction);
    opt.read("iterations", p.iterations);
    opt.read("segments", p.segments);
    opt.read("seed_panel", p.seed_panel);
    opt.read("init_std", p.init_std);
    opt.read("min_std", p.min_std);
    opt.read("max_resample", p.max_resample);
    opt.finish();
  }
  s.finish();
}

void read_output(Section s, OutputConfig& o) {
  s.read("dir", o.dir);
  s.read("frames_every", o.frames_every);
  s.read("log", o.log);
  s.finish();
}

RunConfig from_node(const YAML::Node& root) {
  RunConfig c;
  Section top(root, "");
  top.read("seed", c.seed);
  {
    Section sc = top.child("scenario");
    read_terrain(sc.child("terrain"), c.scenario.terrain);
    read_wind(sc.child("wind"), c.scenario.wind);
    read_fire(sc.child("fire"), c.scenario.fire);
    sc.finish();
  }
  read_environment(top.child("environment"), c.environment);
  read_strategy(top.child("strategy"), c.strategy);
  read_output(top.child("output"), c.output);
  top.finish();
  validate(c);
  return c;
}

YAML::Node merge(const YAML::Node& base, const YAML::Node& over) {
  if (!base || !base.IsMap() || !over.IsMap()) return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : over) {
    const auto key = kv.first.as<std::string>();
    out[key] = merge(out[key], kv.second);
  }
  return out;
}

YAML::Node parse_text(std::string_view text, const std::string& origin) {
  try {
    YAML::Node n = YAML::Load(std::string(text));
    return n.IsNull() ? YAML::Node(YAML::NodeType::Map) : n;
  } catch (const YAML::Exception& e) {
    throw ConfigError("", origin + ": parse error: " + e.what());
  }
}

void absolutize(YAML::Node root, std::initializer_list<std::string_view> path, const fs::path& dir) {
  YAML::Node n = root;
  for (std::string_view k : path) {
    if (!n.IsMap()) return;
    const YAML::Node& parent = n;
    YAML::Node next = parent[std::string(k)];
    if (!next) return;
    n.reset(next);
  }
  if (!n.IsScalar() || n.Scalar().empty()) return;
  const fs::path p(n.Scalar());
  if (p.is_relative()) n = (dir / p).lexically_normal().string();
}

YAML::Node load_file(const fs::path& path, int depth) {
  if (depth > 16) throw ConfigError("include", "includes nested too deeply at " + path.string());
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  YAML::Node doc = parse_text(buf.str(), path.string());
  if (!doc.IsMap()) throw ConfigError("", path.string() + ": top level must be a mapping");
  const fs::path dir = path.parent_path();

  YAML::Node merged(YAML::NodeType::Map);
  if (YAML::Node inc = doc["include"]) {
    std::vector<std::string> files;
    if (inc.IsScalar()) files.push_back(inc.Scalar());
    else if (inc.IsSequence())
      for (std::size_t i = 0; i < inc.size(); ++i) files.push_back(Section::scalar<std::string>(inc[i], "include"));
    else throw ConfigError("include", "expected a path or a list of paths");
    for (const std::string& f : files) merged = merge(merged, load_file((dir / f).lexically_normal(), depth + 1));
    doc.remove("include");
  }
  absolutize(doc, {"scenario", "terrain", "bundle"}, dir);
  absolutize(doc, {"strategy", "plan"}, dir);
  return merge(merged, doc);
}

nlohmann::json cell_json(Cell c) { return nlohmann::json::array({c.row, c.col}); }

}  // namespace

std::string_view policy_name(PolicyKind p) noexcept { return enum_name(p, kPolicies); }

RunConfig load_config(const std::vector<fs::path>& paths) {
  YAML::Node merged(YAML::NodeType::Map);
  for (const fs::path& p : paths) merged = merge(merged, load_file(p, 0));
  return from_node(merged);
}

RunConfig parse_config(std::string_view text) { return from_node(parse_text(text, "config")); }

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  return from_node(merge(parse_text(dump_config(base), "base config"), parse_text(text, "config")));
}

void validate(const RunConfig& c) {
  const TerrainConfig& t = c.scenario.terrain;
  auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError(key, msg); };
  if (t.source == TerrainSource::files && t.bundle.empty()) fail("scenario.terrain.bundle", "required when source is files");
  if (t.rows < 2) fail("scenario.terrain.rows", "must be >= 2");
  if (t.cols < 2) fail("scenario.terrain.cols", "must be >= 2");
  if (!(t.cell_size > 0.0)) fail("scenario.terrain.cell_size", "must be > 0");
  if (t.octaves < 1) fail("scenario.terrain.octaves", "must be >= 1");
  if (!(t.persistence > 0.0 && t.persistence <= 1.0)) fail("scenario.terrain.persistence", "must be in (0, 1]");
  if (!(t.frequency > 0.0)) fail("scenario.terrain.frequency", "must be > 0");
  if (!(t.elevation_max >= t.elevation_min)) fail("scenario.terrain.elevation_max", "must be >= elevation_min");
  if (t.fuel_ids.empty()) fail("scenario.terrain.fuel_ids", "must not be empty");
  const auto catalog = shared_standard_catalog();
  for (std::size_t i = 0; i < t.fuel_ids.size(); ++i) {
    if (!catalog->contains(t.fuel_ids[i])) {
      fail("scenario.terrain.fuel_ids[" + std::to_string(i) + "]", "unknown fuel model " + std::to_string(t.fuel_ids[i]));
    }
  }
  if (!(t.fuel_frequency > 0.0)) fail("scenario.terrain.fuel_frequency", "must be > 0");
  if (!(t.nonburnable_fraction >= 0.0 && t.nonburnable_fraction < 1.0)) {
    fail("scenario.terrain.nonburnable_fraction", "must be in [0, 1)");
  }

  const WindConfig& w = c.scenario.wind;
  if (!(w.speed >= 0.0)) fail("scenario.wind.speed", "must be >= 0");
  if (!std::isfinite(w.direction)) fail("scenario.wind.direction", "must be finite");
  if (w.steps < 1) fail("scenario.wind.steps", "must be >= 1");
  if (!(w.variation >= 0.0)) fail("scenario.wind.variation", "must be >= 0");
  if (!(w.direction_spread >= 0.0)) fail("scenario.wind.direction_spread", "must be >= 0");
  if (!(w.frequency > 0.0)) fail("scenario.wind.frequency", "must be > 0");
  if (!(w.viscosity > 0.0)) fail("scenario.wind.viscosity", "must be > 0");
  if (!(w.forcing >= 0.0)) fail("scenario.wind.forcing", "must be >= 0");
  if (w.vortices < 0) fail("scenario.wind.vortices", "must be >= 0");
  if (!(w.solver_dt > 0.0)) fail("scenario.wind.solver_dt", "must be > 0");
  if (w.pressure_iterations < 1) fail("scenario.wind.pressure_iterations", "must be >= 1");
  if (w.diffusion_iterations < 1) fail("scenario.wind.diffusion_iterations", "must be >= 1");

  try {
    c.scenario.fire.validate();
  } catch (const std::invalid_argument& e) {
    fail("scenario.fire", e.what());
  }
  if (t.source == TerrainSource::procedural) {
    if (const auto& ig = c.scenario.fire.ignition; ig && (ig->row < 0 || ig->col < 0 || ig->row >= t.rows || ig->col >= t.cols)) {
      fail("scenario.fire.ignition", "cell outside the grid");
    }
    c.environment.validate(t.rows, t.cols);
  } else {
    c.environment.validate(std::numeric_limits<int>::max(), std::numeric_limits<int>::max());
  }

  const StrategyConfig& s = c.strategy;
  if (s.episodes < 1) fail("strategy.episodes", "must be >= 1");
  if (s.budget < 1) fail("strategy.budget", "must be >= 1");
  if (s.policy == PolicyKind::plan && s.plan.empty()) fail("strategy.plan", "required for the plan policy");
  const bool horizontal = s.line.direction == Movement::left || s.line.direction == Movement::right;
  const bool vertical = s.line.direction == Movement::up || s.line.direction == Movement::down;
  if ((s.line.axis == LineAxis::row && !horizontal) || (s.line.axis == LineAxis::col && !vertical)) {
    fail("strategy.line.direction", "must run along the line axis");
  }
  if (s.line.index < -1) fail("strategy.line.index", "must be >= -1");
  const CemParams& p = s.optimizer;
  if (p.population < 1) fail("strategy.optimizer.population", "must be >= 1");
  if (!(p.elite_fraction > 0.0 && p.elite_fraction <= 1.0)) fail("strategy.optimizer.elite_fraction", "must be in (0, 1]");
  if (p.iterations < 1) fail("strategy.optimizer.iterations", "must be >= 1");
  if (p.segments < 1) fail("strategy.optimizer.segments", "must be >= 1");
  if (p.seed_panel < 1) fail("strategy.optimizer.seed_panel", "must be >= 1");
  if (!(p.init_std >= 0.0)) fail("strategy.optimizer.init_std", "must be >= 0");
  if (!(p.min_std >= 0.0)) fail("strategy.optimizer.min_std", "must be >= 0");
  if (p.max_resample < 0) fail("strategy.optimizer.max_resample", "must be >= 0");

  if (c.output.frames_every < 0) fail("output.frames_every", "must be >= 0");
}

nlohmann::json config_to_json(const RunConfig& c) {
  using nlohmann::json;
  const TerrainConfig& t = c.scenario.terrain;
  const WindConfig& w = c.scenario.wind;
  const FireConfig& f = c.scenario.fire;
  const EpisodeConfig& e = c.environment;
  const StrategyConfig& s = c.strategy;

  json movements = json::array(), interactions = json::array(), attributes = json::array();
  for (Movement m : e.movements) movements.push_back(movement_name(m));
  for (Interaction i : e.interactions) interactions.push_back(interaction_name(i));
  for (Attribute a : e.attributes) attributes.push_back(attribute_name(a));

  json j;
  j["seed"] = c.seed;
  j["scenario"]["terrain"] = {
      {"source", enum_name(t.source, kSources)},
      {"bundle", t.bundle},
      {"rows", t.rows},
      {"cols", t.cols},
      {"cell_size", t.cell_size},
      {"origin", t.origin ? json::array({t.origin->lat, t.origin->lon}) : json(nullptr)},
      {"octaves", t.octaves},
      {"persistence", t.persistence},
      {"frequency", t.frequency},
      {"elevation_min", t.elevation_min},
      {"elevation_max", t.elevation_max},
      {"fuel_ids", t.fuel_ids},
      {"fuel_frequency", t.fuel_frequency},
      {"nonburnable_fraction", t.nonburnable_fraction}};
  j["scenario"]["wind"] = {{"mode", wind_mode_name(w.mode)},
                           {"speed", w.speed},
                           {"direction", w.direction},
                           {"steps", w.steps},
                           {"variation", w.variation},
                           {"direction_spread", w.direction_spread},
                           {"frequency", w.frequency},
                           {"drift", w.drift},
                           {"viscosity", w.viscosity},
                           {"forcing", w.forcing},
                           {"vortices", w.vortices},
                           {"solver_dt", w.solver_dt},
                           {"pressure_solver", enum_name(w.pressure_solver, kSolvers)},
                           {"pressure_iterations", w.pressure_iterations},
                           {"diffusion_iterations", w.diffusion_iterations}};
  j["scenario"]["fire"] = {{"dt", f.dt},
                           {"attenuation", f.attenuation},
                           {"scratchline", f.mitigation.scratchline},
                           {"wetline", f.mitigation.wetline},
                           {"max_fire_duration", f.max_fire_duration},
                           {"dead_fuel_moisture", f.dead_fuel_moisture},
                           {"ignition", f.ignition ? cell_json(*f.ignition) : json("random")},
                           {"step_cap", f.step_cap}};
  j["environment"] = {{"agent_start", cell_json(e.agent_start)},
                      {"agent_speed", e.agent_speed},
                      {"movements", movements},
                      {"interactions", interactions},
                      {"attributes", attributes},
                      {"normalize", e.normalize},
                      {"max_agent_steps", e.max_agent_steps}};
  j["strategy"] = {{"policy", policy_name(s.policy)},
                   {"episodes", s.episodes},
                   {"line",
                    {{"axis", enum_name(s.line.axis, kAxes)},
                     {"index", s.line.index},
                     {"direction", movement_name(s.line.direction)}}},
                   {"plan", s.plan},
                   {"budget", s.budget},
                   {"optimizer",
                    {{"population", s.optimizer.population},
                     {"elite_fraction", s.optimizer.elite_fraction},
                     {"iterations", s.optimizer.iterations},
                     {"segments", s.optimizer.segments},
                     {"seed_panel", s.optimizer.seed_panel},
                     {"init_std", s.optimizer.init_std},
                     {"min_std", s.optimizer.min_std},
                     {"max_resample", s.optimizer.max_resample}}}};
  j["output"] = {{"dir", c.output.dir}, {"frames_every", c.output.frames_every}, {"log", c.output.log}};
  return j;
}

std::string dump_config(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::shared_ptr<const Scenario> build_scenario(const RunConfig& c) {
  const TerrainConfig& t = c.scenario.terrain;
  const WindConfig& w = c.scenario.wind;
  LayerStack stack;
  if (t.source == TerrainSource::files) {
    stack = load_bundle(t.bundle);
  } else {
    ProceduralParams p;
    p.octaves = t.octaves;
    p.persistence = t.persistence;
    p.frequency = t.frequency;
    p.elevation_min = t.elevation_min;
    p.elevation_max = t.elevation_max;
    p.fuel_ids = t.fuel_ids;
    p.fuel_frequency = t.fuel_frequency;
    p.nonburnable_fraction = t.nonburnable_fraction;
    p.cell_size = t.cell_size;
    p.origin = t.origin;
    stack = generate_procedural(derive_seed(c.seed, "terrain"), t.rows, t.cols, p);
  }
  if (const auto& ig = c.scenario.fire.ignition; ig && !stack.contains(*ig)) {
    throw ConfigError("scenario.fire.ignition", "cell outside the grid");
  }
  c.environment.validate(stack.rows(), stack.cols());

  WindField wind;
  const std::uint64_t wind_seed = derive_seed(c.seed, "wind");
  switch (w.mode) {
    case WindMode::constant: wind = WindField::constant(w.speed, w.direction); break;
    case WindMode::generated: {
      NoiseWindParams p;
      p.base_speed = w.speed;
      p.base_direction = w.direction;
      p.speed_variation = w.variation;
      p.direction_spread = w.direction_spread;
      p.frequency = w.frequency;
      p.drift = w.drift;
      wind = generate_wind_noise(wind_seed, stack.rows(), stack.cols(), w.steps, p);
      break;
    }
    case WindMode::fluid: {
      FluidParams p;
      p.viscosity = w.viscosity;
      p.base_speed = w.speed;
      p.base_direction = w.direction;
      p.forcing = w.forcing;
      p.vortices = w.vortices;
      p.dt = w.solver_dt;
      p.diffusion_iterations = w.diffusion_iterations;
      p.solver = w.pressure_solver;
      p.pressure_iterations = w.pressure_iterations;
      wind = generate_wind_fluid(wind_seed, stack, w.steps, p);
      break;
    }
  }
  return make_scenario(std::move(stack), std::move(wind), c.scenario.fire);
}

PolicyFactory make_policy(const RunConfig& c) {
  switch (c.strategy.policy) {
    case PolicyKind::noop: return noop_policy();
    case PolicyKind::random: return random_policy();
    case PolicyKind::line: {
      const LineConfig& l = c.strategy.line;
      const int index = l.index >= 0 ? l.index
                        : l.axis == LineAxis::row ? c.environment.agent_start.row
                                                  : c.environment.agent_start.col;
      return scripted_line_policy(l.axis, index, l.direction);
    }
    case PolicyKind::plan: {
      std::ifstream in(c.strategy.plan);
      if (!in) throw ConfigError("strategy.plan", "cannot read plan file " + c.strategy.plan);
      std::stringstream buf;
      buf << in.rdbuf();
      return plan_policy(plan_from_json(buf.str()));
    }
  }
  throw ConfigError("strategy.policy", "unknown policy");
}

}  // namespace emberline
