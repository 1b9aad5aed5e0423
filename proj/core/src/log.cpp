#include "tinyaction/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tinyaction {

namespace {

LogLevel parse_env() {
  const char* env = std::getenv("TINYACTION_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  if (std::strcmp(env, "quiet") == 0) return LogLevel::kQuiet;
  if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
  return LogLevel::kInfo;
}

LogLevel& level_ref() {
  static LogLevel level = parse_env();
  return level;
}

}  // namespace

LogLevel log_level() { return level_ref(); }

void set_log_level(LogLevel level) { level_ref() = level; }

bool log_enabled(LogLevel level) { return static_cast<int>(level) <= static_cast<int>(log_level()); }

void log_info(const std::string& msg) {
  if (log_enabled(LogLevel::kInfo)) std::fprintf(stderr, "[tinyaction] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_enabled(LogLevel::kDebug)) std::fprintf(stderr, "[tinyaction:debug] %s\n", msg.c_str());
}

}  // namespace tinyaction
