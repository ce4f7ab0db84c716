#include "hawkesnet/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <stdexcept>

namespace hawkesnet {

namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::warn)};
std::atomic<std::size_t> g_warnings{0};
std::mutex g_sink_mutex;
std::function<void(LogLevel, std::string_view)> g_sink;

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warning";
    case LogLevel::error: return "error";
    case LogLevel::off: break;
  }
  return "";
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

LogLevel parse_log_level(std::string_view name) {
  if (name == "debug") return LogLevel::debug;
  if (name == "info") return LogLevel::info;
  if (name == "warn" || name == "warning") return LogLevel::warn;
  if (name == "error") return LogLevel::error;
  if (name == "off") return LogLevel::off;
  throw std::invalid_argument("unknown log level '" + std::string(name) + "'");
}

void set_log_sink(std::function<void(LogLevel, std::string_view)> sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void log_message(LogLevel level, std::string_view message) {
  if (level == LogLevel::warn) g_warnings.fetch_add(1, std::memory_order_relaxed);
  if (static_cast<int>(level) < g_level.load()) return;
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(level, message);
    return;
  }
  std::cerr << "hawkesnet " << level_tag(level) << ": " << message << '\n';
}

std::size_t warning_count() { return g_warnings.load(); }

}  // namespace hawkesnet
