#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace iocforge::cli {

// Exit codes: 0 success, 1 error, 2 unidentifiable, 64 usage.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnidentifiable = 2;
inline constexpr int kExitUsage = 64;

int cmd_simulate(const RunConfig& config);
int cmd_forward(const RunConfig& config, const std::string& method);
int cmd_invert(const RunConfig& config, bool noisy,
               const std::optional<std::filesystem::path>& data_path,
               const std::optional<std::filesystem::path>& optimal_path);
int cmd_check_id(const RunConfig& config, const std::string& mode);
int cmd_sweep_tini(const RunConfig& config);
int cmd_sweep_noise(const RunConfig& config);
int cmd_bench(const RunConfig& config);

}  // namespace iocforge::cli
