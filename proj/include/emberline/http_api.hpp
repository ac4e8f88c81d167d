#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace emberline {

class SessionManager;

/// JSON API over a SessionManager:
///   POST   /sessions                      create from a JSON config body
///   POST   /sessions/replay               create from a command log and replay it
///   GET    /sessions/{id}/state[?since=R]  full grid, or coalesced delta since R
///   POST   /sessions/{id}/mitigations     {"cell": [r, c], "kind": "fireline"}
///   POST   /sessions/{id}/advance         {"steps": N}
///   GET    /sessions/{id}/log             creation config plus ordered commands
///   GET    /sessions/{id}/stream          NDJSON deltas, one per revision
///   DELETE /sessions/{id}
/// Errors are {"error": message, "key_path": path} with a 4xx status.
void install_routes(httplib::Server& server, SessionManager& manager);

/// Blocks serving on host:port until the server is stopped.
/// Returns false when the address cannot be bound.
bool serve(SessionManager& manager, const std::string& host, int port);

}  // namespace emberline
