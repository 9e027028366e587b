#pragma once

#include <functional>
#include <string>

namespace hudtrace {

enum class LogLevel { Debug, Info, Warn, Error };

// Diagnostics go to stderr by default; machine outputs never pass through here.
using LogSink = std::function<void(LogLevel, const std::string&)>;

void set_log_sink(LogSink sink);
void set_log_level(LogLevel min_level);
void log(LogLevel level, const std::string& message);

inline void log_info(const std::string& m) { log(LogLevel::Info, m); }
inline void log_warn(const std::string& m) { log(LogLevel::Warn, m); }

}  // namespace hudtrace
