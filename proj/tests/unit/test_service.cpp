#include <doctest.h>

#include <atomic>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "emberline/http_api.hpp"
#include "emberline/service.hpp"
#include "support/support.hpp"

using namespace emberline;
using nlohmann::json;
using emberline::testing::TempDir;

namespace {

RunConfig small_defaults() {
  RunConfig c;
  c.seed = 3;
  c.scenario.terrain.rows = 24;
  c.scenario.terrain.cols = 24;
  c.scenario.fire.ignition = Cell{12, 12};
  return c;
}

ServiceOptions small_options() {
  ServiceOptions o;
  o.defaults = small_defaults();
  return o;
}

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.status();
  }
  return 200;
}

std::string key_path_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.key_path();
  }
  return "<no error>";
}

json ring(int r0, int c0, int r1, int c1) {
  json cells = json::array();
  for (int c = c0; c <= c1; ++c) {
    cells.push_back({r0, c});
    cells.push_back({r1, c});
  }
  for (int r = r0 + 1; r < r1; ++r) {
    cells.push_back({r, c0});
    cells.push_back({r, c1});
  }
  return cells;
}

void apply_delta(json& grid, const json& delta) {
  for (const json& ch : delta["changed"]) grid[ch[0].get<int>()][ch[1].get<int>()] = ch[2];
}

}  // namespace

TEST_CASE("a new session describes its grid, legend and benchmark") {
  SessionManager m(small_options());
  const json d = m.create("{}");
  CHECK(d["rows"] == 24);
  CHECK(d["cols"] == 24);
  CHECK(d["ignition"] == json::array({12, 12}));
  CHECK(d["revision"] == 0);
  CHECK(d["legend"] == status_legend());
  CHECK(d["legend"]["3"] == "fireline");
  CHECK(d["legend"]["6"] == "agent");
  CHECK(d["benchmark"]["total_burned"].get<int>() > 0);
  CHECK(d["counts"]["burning"] == 1);
  const json s = m.state(d["id"], std::nullopt);
  CHECK(s["full"] == true);
  CHECK(s["grid"].size() == 24);
  CHECK(s["grid"][12][12] == 1);
  CHECK(s["saved_proportion"] == 0.0);
  CHECK(m.size() == 1);
}

TEST_CASE("sessions created from equal configs start identically and stay isolated") {
  SessionManager m(small_options());
  const std::string a = m.create("{\"scenario\": {\"wind\": {\"speed\": 9}}}")["id"];
  const std::string b = m.create("scenario:\n  wind:\n    speed: 9\n")["id"];
  CHECK(a != b);
  CHECK(m.state(a, std::nullopt) == m.state(b, std::nullopt));
  m.mitigate(a, {{"cell", {0, 0}}, {"kind", "fireline"}});
  m.advance(a, {{"steps", 3}});
  CHECK(m.state(b, std::nullopt)["revision"] == 0);
  CHECK(m.state(b, std::nullopt)["t"] == 0);
  CHECK(m.state(a, std::nullopt)["grid"][0][0] == 3);
}

TEST_CASE("mitigations produce deltas and bump the revision") {
  SessionManager m(small_options());
  const std::string id = m.create("{}")["id"];
  const json r = m.mitigate(id, {{"cell", {2, 3}}, {"kind", "fireline"}});
  CHECK(r["applied"] == true);
  CHECK(r["revision"] == 1);
  CHECK(r["changed"] == json::array({json::array({2, 3, 3})}));
  CHECK(r["counts"]["mitigated"] == 1);
  const json again = m.mitigate(id, {{"cell", {2, 3}}, {"kind", "wetline"}});
  CHECK(again["applied"] == false);
  CHECK(again["revision"] == 2);
  CHECK(again["changed"].empty());
  const json burning = m.mitigate(id, {{"cell", {12, 12}}, {"kind", "scratchline"}});
  CHECK(burning["applied"] == false);
  CHECK(burning["changed"].empty());
}

TEST_CASE("bad requests map to client errors with key paths") {
  SessionManager m(small_options());
  const std::string id = m.create("{}")["id"];
  CHECK(status_of([&] { m.mitigate(id, {{"cell", {0, 0}}, {"kind", "moat"}}); }) == 400);
  CHECK(key_path_of([&] { m.mitigate(id, {{"cell", {0, 0}}, {"kind", "moat"}}); }) == "kind");
  CHECK(key_path_of([&] { m.mitigate(id, {{"cell", {24, 0}}, {"kind", "fireline"}}); }) == "cell");
  CHECK(key_path_of([&] { m.mitigate(id, {{"cell", {0}}, {"kind", "fireline"}}); }) == "cell");
  CHECK(status_of([&] { m.mitigate(id, json::array()); }) == 400);
  CHECK(key_path_of([&] { m.advance(id, {{"steps", 0}}); }) == "steps");
  CHECK(key_path_of([&] { m.advance(id, {{"steps", "many"}}); }) == "steps");
  CHECK(status_of([&] { m.advance(id, {{"steps", 1000000}}); }) == 400);
  CHECK(status_of([&] { m.state("nope", std::nullopt); }) == 404);
  CHECK(status_of([&] { m.state(id, 5); }) == 400);
  CHECK(status_of([&] { m.state(id, -1); }) == 400);
  CHECK(key_path_of([&] { m.create("{\"environment\": {\"agnet_speed\": 4}}"); }) == "environment.agnet_speed");
  CHECK(status_of([&] { m.create("{\"scenario\": {\"terrain\": {\"rows\": 1}}}"); }) == 400);
  CHECK(status_of([&] { m.replay(json::object()); }) == 400);
  CHECK(status_of([&] { m.remove("nope"); }) == 404);
}

TEST_CASE("deltas from revision zero compose into the full state") {
  SessionManager m(small_options());
  const std::string id = m.create("{}")["id"];
  json grid = m.state(id, std::nullopt)["grid"];
  json stepwise = grid;
  std::int64_t rev = 0;
  for (int k = 0; k < 6; ++k) {
    m.mitigate(id, {{"cell", {k, 20}}, {"kind", k % 2 ? "wetline" : "fireline"}});
    m.advance(id, {{"steps", 2 + k}});
    const json d = m.state(id, rev);
    apply_delta(stepwise, d);
    rev = d["revision"];
  }
  apply_delta(grid, m.state(id, 0));
  const json full = m.state(id, std::nullopt);
  CHECK(grid == full["grid"]);
  CHECK(stepwise == full["grid"]);
  CHECK(m.state(id, rev)["changed"].empty());
  CHECK(m.state(id, rev)["counts"] == full["counts"]);
}

TEST_CASE("a containing ring saves land against the benchmark") {
  SessionManager m(small_options());
  const std::string id = m.create("{}")["id"];
  for (const json& cell : ring(9, 9, 15, 15)) m.mitigate(id, {{"cell", cell}, {"kind", "fireline"}});
  json r;
  do {
    r = m.advance(id, {{"steps", 50}});
  } while (!r["quiescent"].get<bool>());
  CHECK(r["saved_proportion"].get<double>() > 0.0);
  CHECK(r["steps"].is_array());
  const json s = m.state(id, std::nullopt);
  for (int row = 0; row < 24; ++row) {
    CHECK(s["grid"][row][0] == 0);
    CHECK(s["grid"][row][23] == 0);
  }
}

TEST_CASE("advancing a quiescent fire still records the command") {
  SessionManager m(small_options());
  const std::string id = m.create("{\"scenario\": {\"fire\": {\"max_fire_duration\": 1, \"attenuation\": 0}}}")["id"];
  const json r = m.advance(id, {{"steps", 5}});
  CHECK(r["quiescent"] == true);
  CHECK(r["steps"].size() == 1);
  const json r2 = m.advance(id, {{"steps", 5}});
  CHECK(r2["revision"] == 2);
  CHECK(r2["steps"].empty());
  CHECK(m.command_log(id)["commands"].size() == 2);
}

TEST_CASE("replaying a command log reproduces the session") {
  TempDir dir;
  ServiceOptions o = small_options();
  o.log_dir = dir.path();
  SessionManager m(o);
  const std::string id = m.create("{\"seed\": 17, \"scenario\": {\"fire\": {\"ignition\": \"random\"}}}")["id"];
  m.mitigate(id, {{"cell", {1, 1}}, {"kind", "scratchline"}});
  m.advance(id, {{"steps", 7}});
  m.mitigate(id, {{"cell", {20, 4}}, {"kind", "fireline"}});
  m.advance(id, {{"steps", 11}});
  const json log = m.command_log(id);
  CHECK(log["commands"].size() == 4);
  CHECK(log["commands"][1] == json{{"op", "advance"}, {"steps", 7}});
  CHECK(json::parse(emberline::testing::read_file(dir / (id + ".json"))) == log);
  const json replayed = m.replay(log);
  CHECK(replayed["state"].dump() == m.state(id, std::nullopt).dump());
  CHECK(replayed["session"]["revision"] == 4);
  CHECK(replayed["session"]["id"] != id);
  CHECK(status_of([&] {
          m.replay(json{{"config", json::object()}, {"commands", json::array({json{{"op", "teleport"}}})}});
        }) == 400);
}

TEST_CASE("subscriptions deliver each revision to every subscriber") {
  ServiceOptions o = small_options();
  o.max_backlog = 3;
  SessionManager m(o);
  const std::string id = m.create("{}")["id"];
  auto first = m.subscribe(id, std::nullopt);
  auto second = m.subscribe(id, 0);
  CHECK_FALSE(first->next(std::chrono::milliseconds(10)).has_value());
  const json placed = m.mitigate(id, {{"cell", {0, 5}}, {"kind", "fireline"}});
  const auto msg = first->next(std::chrono::milliseconds(100));
  REQUIRE(msg.has_value());
  CHECK((*msg)["changed"] == placed["changed"]);
  CHECK((*msg)["revision"] == 1);
  CHECK((*second->next(std::chrono::milliseconds(100)))["revision"] == 1);

  std::thread writer([&] {
    for (int k = 0; k < 2; ++k) m.advance(id, {{"steps", 1}});
  });
  writer.join();
  CHECK((*first->next(std::chrono::milliseconds(100)))["revision"] == 2);
  CHECK((*first->next(std::chrono::milliseconds(100)))["revision"] == 3);

  for (int k = 0; k < 5; ++k) m.advance(id, {{"steps", 1}});
  const auto coalesced = second->next(std::chrono::milliseconds(100));
  REQUIRE(coalesced.has_value());
  CHECK((*coalesced)["since"] == 1);
  CHECK((*coalesced)["revision"] == 8);
  const json expected = m.state(id, 1);
  CHECK((*coalesced)["changed"] == expected["changed"]);
  CHECK((*coalesced)["counts"] == expected["counts"]);
  CHECK(status_of([&] { (void)m.subscribe(id, 99); }) == 400);

  std::thread waiter([&] { CHECK_FALSE(first->next(std::chrono::seconds(5)).has_value()); });
  m.remove(id);
  waiter.join();
  CHECK(first->closed());
  CHECK(m.size() == 0);
}

TEST_CASE("idle sessions are swept after the time-to-live") {
  auto now = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::time_point{});
  ServiceOptions o = small_options();
  o.idle_ttl = std::chrono::seconds(60);
  o.clock = [now] { return *now; };
  SessionManager m(o);
  const std::string a = m.create("{}")["id"];
  *now += std::chrono::seconds(40);
  const std::string b = m.create("{}")["id"];
  *now += std::chrono::seconds(30);
  CHECK(m.sweep() == 1);
  CHECK(status_of([&] { m.state(a, std::nullopt); }) == 404);
  CHECK_NOTHROW(m.state(b, std::nullopt));
  *now += std::chrono::seconds(59);
  CHECK(m.sweep() == 0);
  *now += std::chrono::seconds(2);
  CHECK(m.sweep() == 1);
  CHECK(m.size() == 0);
}

TEST_CASE("file-backed sessions reject unknown fuel codes") {
  TempDir dir;
  write_bundle(dir / "bundle", emberline::testing::uniform_stack(6, 6, 1));
  Grid<std::int32_t> fuel(6, 6, 1);
  fuel(2, 2) = 99;
  write_grid_file(dir / "bundle/fuel.grid", fuel);
  SessionManager m(small_options());
  const json body{{"scenario", {{"terrain", {{"source", "files"}, {"bundle", (dir / "bundle").string()}}}}}};
  CHECK(status_of([&] { m.create(body.dump()); }) == 400);
  CHECK(m.size() == 0);
}

TEST_CASE("HTTP routes") {
  SessionManager m(small_options());
  httplib::Server server;
  install_routes(server, m);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto created = client.Post("/sessions", "{}", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = json::parse(created->body)["id"];
  const std::string base = "/sessions/" + id;

  auto placed = client.Post(base + "/mitigations", R"({"cell": [1, 2], "kind": "wetline"})", "application/json");
  REQUIRE(placed);
  CHECK(placed->status == 200);
  CHECK(json::parse(placed->body)["changed"] == json::array({json::array({1, 2, 5})}));

  auto bad = client.Post(base + "/mitigations", R"({"cell": [1, 2], "kind": "moat"})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["key_path"] == "kind");
  auto garbage = client.Post(base + "/advance", "{not json", "application/json");
  REQUIRE(garbage);
  CHECK(garbage->status == 400);

  auto advanced = client.Post(base + "/advance", R"({"steps": 3})", "application/json");
  REQUIRE(advanced);
  CHECK(json::parse(advanced->body)["t"] == 3);

  auto full = client.Get(base + "/state");
  REQUIRE(full);
  CHECK(json::parse(full->body)["revision"] == 2);
  auto delta = client.Get(base + "/state?since=1");
  REQUIRE(delta);
  CHECK(json::parse(delta->body)["since"] == 1);
  auto future = client.Get(base + "/state?since=9");
  REQUIRE(future);
  CHECK(future->status == 400);
  auto not_int = client.Get(base + "/state?since=x");
  REQUIRE(not_int);
  CHECK(json::parse(not_int->body)["key_path"] == "since");
  auto missing = client.Get("/sessions/nope/state");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  auto log = client.Get(base + "/log");
  REQUIRE(log);
  const json command_log = json::parse(log->body);
  CHECK(command_log["commands"].size() == 2);
  auto replayed = client.Post("/sessions/replay", command_log.dump(), "application/json");
  REQUIRE(replayed);
  CHECK(replayed->status == 201);
  CHECK(json::parse(replayed->body)["state"]["grid"] == json::parse(full->body)["grid"]);

  auto stream = client.Get(base + "/stream?since=0&max=2");
  REQUIRE(stream);
  CHECK(stream->status == 200);
  std::vector<json> lines;
  std::istringstream in(stream->body);
  for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0]["revision"] == 1);
  CHECK(lines[1]["revision"] == 2);

  auto deleted = client.Delete(base);
  REQUIRE(deleted);
  CHECK(deleted->status == 200);
  auto gone = client.Get(base + "/state");
  REQUIRE(gone);
  CHECK(gone->status == 404);

  server.stop();
  thread.join();
}
