#include "emberline/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "emberline/errors.hpp"

namespace emberline {

void set_log_level(std::string_view level) {
  spdlog::level::level_enum lvl;
  if (level == "error") lvl = spdlog::level::err;
  else if (level == "warn") lvl = spdlog::level::warn;
  else if (level == "info") lvl = spdlog::level::info;
  else if (level == "debug") lvl = spdlog::level::debug;
  else throw ConfigError("EMBERLINE_LOG_LEVEL", "expected error, warn, info or debug, got '" + std::string(level) + "'");
  spdlog::set_level(lvl);
}

void init_logging() {
  static bool installed = false;
  if (!installed) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("emberline"));
    spdlog::set_pattern("[%l] %v");
    installed = true;
  }
  const char* env = std::getenv("EMBERLINE_LOG_LEVEL");
  set_log_level(env && *env ? env : "warn");
}

}  // namespace emberline
