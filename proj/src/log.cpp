#include "drohs/log.hpp"

#include <cstdlib>
#include <cstring>

namespace drohs {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("DROHS_LOG");
    if (!env) return LogLevel::Off;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Off;
  }();
  return level;
}

}  // namespace drohs
