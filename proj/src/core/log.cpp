#include "hudtrace/core/log.hpp"

#include <cstdio>
#include <mutex>

namespace hudtrace {
namespace {

std::mutex g_mutex;
LogLevel g_level = LogLevel::Info;

void stderr_sink(LogLevel level, const std::string& message) {
  static constexpr const char* kNames[] = {"debug", "info", "warning", "error"};
  std::fprintf(stderr, "[%s] %s\n", kNames[static_cast<int>(level)], message.c_str());
}

LogSink& sink() {
  static LogSink s = stderr_sink;
  return s;
}

}  // namespace

void set_log_sink(LogSink s) {
  std::lock_guard lock(g_mutex);
  sink() = s ? std::move(s) : LogSink(stderr_sink);
}

void set_log_level(LogLevel min_level) {
  std::lock_guard lock(g_mutex);
  g_level = min_level;
}

void log(LogLevel level, const std::string& message) {
  std::lock_guard lock(g_mutex);
  if (level < g_level) return;
  sink()(level, message);
}

}  // namespace hudtrace
