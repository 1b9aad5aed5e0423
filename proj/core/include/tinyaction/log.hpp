#pragma once

#include <string>

namespace tinyaction {

// Verbosity is read once from the TINYACTION_LOG environment variable
// (quiet | info | debug, default info). All log output goes to stderr so
// stdout stays clean for data.
enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level();
void set_log_level(LogLevel level);

bool log_enabled(LogLevel level);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace tinyaction
