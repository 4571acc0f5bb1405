#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iocforge/experiments.hpp"
#include "iocforge/lti_data.hpp"

namespace iocforge::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully resolved run configuration. Defaults reproduce the reference
// double-integrator setup; a JSON file overrides the defaults and command
// line flags override the file.
struct RunConfig {
  ExperimentSetup setup;  // system, weights, initial state, T, N, amplitude, seeds, jobs
  Index T_ini = 3;
  std::optional<double> snr_db;  // absent = noise-free
  NoiseChannels noise_channels = NoiseChannels::kOutputs;
  NoiseTarget noise_target = NoiseTarget::kOnline;
  SolverChoice solver = SolverChoice::kBoth;
  std::filesystem::path output_dir = ".";
  Index tini_min = 1;
  Index tini_max = 10;
  std::vector<double> snr_grid_db = {20.0, 30.0, 40.0, 50.0, 60.0};
  std::vector<Index> bench_tini_grid = {3, 5, 7, 9, 11};
  std::string label;  // artifact file suffix; defaults to seed<master_seed>

  std::string artifact_label() const {
    return label.empty() ? "seed" + std::to_string(setup.master_seed) : label;
  }
};

// Values passed on the command line; they win over the file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> jobs;
  std::optional<int> trials;
  std::optional<Index> T;
  std::optional<Index> T_ini;
  std::optional<Index> N;
  std::optional<double> snr_db;
  std::optional<std::string> solver;
  std::optional<std::string> label;
};

RunConfig default_config();

// Loads the optional JSON file, applies overrides, validates. Throws
// ConfigError with the offending field or the violated constraint named.
RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const CliOverrides& overrides);

SolverChoice parse_solver_choice(const std::string& text);

}  // namespace iocforge::cli
