#pragma once

#include <functional>
#include <string_view>

namespace marr {

enum class LogLevel { debug = 0, info = 1, warning = 2, silent = 3 };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Replaces the process-wide sink; the default writes warnings to std::clog.
void set_log_sink(LogSink sink);
void set_log_level(LogLevel level);

void log(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log(LogLevel::warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::info, message); }

} // namespace marr
