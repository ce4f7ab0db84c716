#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace hawkesnet {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_log_level(LogLevel level);
[[nodiscard]] LogLevel log_level();

/// Parses "debug", "info", "warn", "error" or "off".
[[nodiscard]] LogLevel parse_log_level(std::string_view name);

/// Replaces the stderr sink. Passing an empty function restores stderr.
void set_log_sink(std::function<void(LogLevel, std::string_view)> sink);

void log_message(LogLevel level, std::string_view message);

inline void log_debug(std::string_view message) { log_message(LogLevel::debug, message); }
inline void log_info(std::string_view message) { log_message(LogLevel::info, message); }
inline void log_warn(std::string_view message) { log_message(LogLevel::warn, message); }

/// Number of warnings issued since process start (counted even when filtered).
[[nodiscard]] std::size_t warning_count();

}  // namespace hawkesnet
