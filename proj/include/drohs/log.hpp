#pragma once

#include <cstdio>

namespace drohs {

// Log levels are picked up once from the DROHS_LOG environment variable:
// "off" (default), "info", "debug".
enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

LogLevel log_level();

template <typename... Args>
void log_info(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::Info) {
    std::fprintf(stderr, "[drohs] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

template <typename... Args>
void log_debug(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::Debug) {
    std::fprintf(stderr, "[drohs:debug] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

}  // namespace drohs
