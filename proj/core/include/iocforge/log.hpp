#pragma once

#include <string>

namespace iocforge::log {

// Verbosity is controlled by the IOC_FORGE_LOG environment variable:
// "quiet", "info" (default) or "debug".
enum class Level { kQuiet = 0, kInfo = 1, kDebug = 2 };

Level level();

void info(const std::string& msg);
void warn(const std::string& msg);
void debug(const std::string& msg);

}  // namespace iocforge::log
