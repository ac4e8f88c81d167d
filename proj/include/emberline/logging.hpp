#pragma once

#include <string_view>

namespace emberline {

/// Configures the process-wide logger from EMBERLINE_LOG_LEVEL
/// (error, warn, info, debug; default warn). Logs go to stderr.
/// Throws ConfigError for an unrecognized level.
void init_logging();
void set_log_level(std::string_view level);

}  // namespace emberline
