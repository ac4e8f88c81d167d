#include "emberline/http_api.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "emberline/service.hpp"

namespace emberline {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& key_path = {}) {
  json body{{"error", message}};
  if (!key_path.empty()) body["key_path"] = key_path;
  send_json(res, body, status);
}

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.what(), e.key_path());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      spdlog::error("request {} {} failed: {}", req.method, req.path, e.what());
      send_error(res, 500, e.what());
    }
  };
}

std::optional<std::int64_t> int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const std::string v = req.get_param_value(name);
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ServiceError(400, std::string("query parameter '") + name + "' must be an integer", name);
  }
}

json body_json(const httplib::Request& req) { return req.body.empty() ? json::object() : json::parse(req.body); }

}  // namespace

void install_routes(httplib::Server& server, SessionManager& manager) {
  server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) { send_json(res, {{"ok", true}}); }));

  server.Post("/sessions", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                send_json(res, manager.create(req.body.empty() ? std::string("{}") : req.body), 201);
              }));

  server.Post("/sessions/replay", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                send_json(res, manager.replay(json::parse(req.body)), 201);
              }));

  server.Get(R"(/sessions/([^/]+)/state)", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
               send_json(res, manager.state(req.matches[1], int_param(req, "since")));
             }));

  server.Post(R"(/sessions/([^/]+)/mitigations)",
              guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                send_json(res, manager.mitigate(req.matches[1], body_json(req)));
              }));

  server.Post(R"(/sessions/([^/]+)/advance)", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                send_json(res, manager.advance(req.matches[1], body_json(req)));
              }));

  server.Get(R"(/sessions/([^/]+)/log)", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
               send_json(res, manager.command_log(req.matches[1]));
             }));

  server.Delete(R"(/sessions/([^/]+))", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = req.matches[1];
                  manager.remove(id);
                  send_json(res, {{"deleted", id}});
                }));

  // ?since=R starts after revision R (default: now); ?max=N closes the
  // stream after N messages.
  server.Get(R"(/sessions/([^/]+)/stream)", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
               std::shared_ptr<Subscription> sub = manager.subscribe(req.matches[1], int_param(req, "since"));
               const std::int64_t max = int_param(req, "max").value_or(0);
               auto sent = std::make_shared<std::int64_t>(0);
               res.set_chunked_content_provider(
                   "application/x-ndjson", [sub, max, sent](std::size_t, httplib::DataSink& sink) {
                     if (!sink.is_writable()) return false;
                     if (auto msg = sub->next(std::chrono::milliseconds(250))) {
                       const std::string line = msg->dump() + "\n";
                       if (!sink.write(line.data(), line.size())) return false;
                       if (max > 0 && ++*sent >= max) sink.done();
                     } else if (sub->closed()) {
                       sink.done();
                     }
                     return true;
                   });
             }));
}

bool serve(SessionManager& manager, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, manager);
  std::atomic<bool> running{true};
  std::thread sweeper([&] {
    while (running) {
      for (int i = 0; i < 60 && running; ++i) std::this_thread::sleep_for(std::chrono::seconds(1));
      if (running) manager.sweep();
    }
  });
  spdlog::info("serving on {}:{}", host, port);
  const bool ok = server.listen(host, port);
  running = false;
  sweeper.join();
  return ok;
}

}  // namespace emberline
