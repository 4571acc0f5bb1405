#include "iocforge/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace iocforge::log {

namespace {

Level parse_env() {
  const char* raw = std::getenv("IOC_FORGE_LOG");
  if (raw == nullptr) return Level::kInfo;
  const std::string value(raw);
  if (value == "quiet") return Level::kQuiet;
  if (value == "debug") return Level::kDebug;
  if (value == "info" || value.empty()) return Level::kInfo;
  std::fprintf(stderr, "[warn] unknown IOC_FORGE_LOG value '%s', using 'info'\n", raw);
  return Level::kInfo;
}

std::mutex& sink_mutex() {
  static std::mutex mu;
  return mu;
}

void emit(const char* prefix, const std::string& msg) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  std::fprintf(stderr, "%s %s\n", prefix, msg.c_str());
}

}  // namespace

Level level() {
  static const Level cached = parse_env();
  return cached;
}

void info(const std::string& msg) {
  if (level() >= Level::kInfo) emit("[info]", msg);
}

void warn(const std::string& msg) {
  if (level() >= Level::kInfo) emit("[warn]", msg);
}

void debug(const std::string& msg) {
  if (level() >= Level::kDebug) emit("[debug]", msg);
}

}  // namespace iocforge::log
