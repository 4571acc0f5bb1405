#include "config.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace iocforge::cli {

namespace {

using nlohmann::json;

Mat parse_matrix(const json& value, const std::string& field) {
  if (!value.is_array() || value.empty() || !value.front().is_array()) {
    throw ConfigError("field '" + field + "' must be an array of rows");
  }
  const Index rows = static_cast<Index>(value.size());
  const Index cols = static_cast<Index>(value.front().size());
  Mat out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = value.at(i);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError("field '" + field + "' has ragged rows");
    }
    for (Index j = 0; j < cols; ++j) out(i, j) = row.at(j).get<double>();
  }
  return out;
}

Vec parse_vector(const json& value, const std::string& field) {
  if (!value.is_array()) throw ConfigError("field '" + field + "' must be an array");
  Vec out(static_cast<Index>(value.size()));
  for (Index i = 0; i < out.size(); ++i) out[i] = value.at(i).get<double>();
  return out;
}

NoiseChannels parse_channels(const std::string& text) {
  if (text == "inputs") return NoiseChannels::kInputs;
  if (text == "outputs") return NoiseChannels::kOutputs;
  if (text == "both") return NoiseChannels::kBoth;
  throw ConfigError("noise.channels must be one of inputs|outputs|both, got '" + text + "'");
}

NoiseTarget parse_target(const std::string& text) {
  if (text == "online") return NoiseTarget::kOnline;
  if (text == "offline") return NoiseTarget::kOffline;
  if (text == "both") return NoiseTarget::kBoth;
  throw ConfigError("noise.target must be one of online|offline|both, got '" + text + "'");
}

void apply_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  try {
    if (doc.contains("system")) {
      const auto& sys = doc["system"];
      Mat A = sys.contains("A") ? parse_matrix(sys["A"], "system.A") : config.setup.system.A;
      Mat B = sys.contains("B") ? parse_matrix(sys["B"], "system.B") : config.setup.system.B;
      Mat C = sys.contains("C") ? parse_matrix(sys["C"], "system.C") : config.setup.system.C;
      Mat D = sys.contains("D") ? parse_matrix(sys["D"], "system.D") : config.setup.system.D;
      const Index lag = sys.value("lag_bound", Index{0});
      config.setup.system = LtiSystem(std::move(A), std::move(B), std::move(C), std::move(D), lag);
      if (sys.contains("initial_state")) {
        config.setup.initial_state = parse_vector(sys["initial_state"], "system.initial_state");
      }
    }
    if (doc.contains("weights")) {
      const auto& weights = doc["weights"];
      Mat Q = weights.contains("Q") ? parse_matrix(weights["Q"], "weights.Q")
                                    : config.setup.weights.Q;
      Mat R = weights.contains("R") ? parse_matrix(weights["R"], "weights.R")
                                    : config.setup.weights.R;
      config.setup.weights = LqObjective(std::move(Q), std::move(R));
    }
    if (doc.contains("T")) config.setup.T = doc["T"].get<Index>();
    if (doc.contains("T_ini")) config.T_ini = doc["T_ini"].get<Index>();
    if (doc.contains("N")) config.setup.N = doc["N"].get<Index>();
    if (doc.contains("excitation_amplitude")) {
      config.setup.excitation_amplitude = doc["excitation_amplitude"].get<double>();
    }
    if (doc.contains("seeds")) {
      const auto& seeds = doc["seeds"];
      if (seeds.contains("master")) config.setup.master_seed = seeds["master"].get<std::uint64_t>();
      if (seeds.contains("trials")) config.setup.trials = seeds["trials"].get<int>();
    }
    if (doc.contains("noise")) {
      const auto& noise = doc["noise"];
      if (noise.contains("snr_db") && !noise["snr_db"].is_null()) {
        config.snr_db = noise["snr_db"].get<double>();
      }
      if (noise.contains("channels")) {
        config.noise_channels = parse_channels(noise["channels"].get<std::string>());
      }
      if (noise.contains("target")) {
        config.noise_target = parse_target(noise["target"].get<std::string>());
      }
    }
    if (doc.contains("solver")) {
      config.solver = parse_solver_choice(doc["solver"].get<std::string>());
    }
    if (doc.contains("output_dir")) {
      config.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("jobs")) config.setup.jobs = doc["jobs"].get<int>();
    if (doc.contains("label")) config.label = doc["label"].get<std::string>();
    if (doc.contains("sweep")) {
      const auto& sweep = doc["sweep"];
      if (sweep.contains("tini_min")) config.tini_min = sweep["tini_min"].get<Index>();
      if (sweep.contains("tini_max")) config.tini_max = sweep["tini_max"].get<Index>();
      if (sweep.contains("snr_grid_db")) {
        config.snr_grid_db = sweep["snr_grid_db"].get<std::vector<double>>();
      }
      if (sweep.contains("bench_tini_grid")) {
        config.bench_tini_grid = sweep["bench_tini_grid"].get<std::vector<Index>>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("config field error in " + path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& config) {
  const auto& setup = config.setup;
  if (setup.T < 1 || config.T_ini < 1 || setup.N < 1) {
    throw ConfigError("constraint violated: T, T_ini and N must be positive");
  }
  if (setup.T < config.T_ini + setup.N) {
    throw ConfigError("constraint violated: T >= T_ini + N");
  }
  if (setup.trials < 1) throw ConfigError("constraint violated: seeds.trials >= 1");
  if (setup.jobs < 1) throw ConfigError("constraint violated: jobs >= 1");
  if (setup.excitation_amplitude <= 0.0) {
    throw ConfigError("constraint violated: excitation_amplitude > 0");
  }
  if (setup.initial_state.size() != setup.system.n()) {
    throw ConfigError("constraint violated: initial_state length equals the state dimension");
  }
  if (setup.weights.p() != setup.system.p() || setup.weights.m() != setup.system.m()) {
    throw ConfigError("constraint violated: weight dimensions match the system outputs/inputs");
  }
  if (config.tini_min < 1 || config.tini_max < config.tini_min) {
    throw ConfigError("constraint violated: 1 <= sweep.tini_min <= sweep.tini_max");
  }
  if (setup.T < config.tini_max + setup.N) {
    throw ConfigError("constraint violated: T >= sweep.tini_max + N");
  }
  if (config.snr_grid_db.empty()) {
    throw ConfigError("constraint violated: sweep.snr_grid_db is non-empty");
  }
  for (const Index t : config.bench_tini_grid) {
    if (t < 1 || setup.T < t + setup.N) {
      throw ConfigError("constraint violated: T >= bench T_ini + N for every grid entry");
    }
  }
  if (config.snr_db && *config.snr_db <= 0.0 && std::isfinite(*config.snr_db)) {
    throw ConfigError("constraint violated: noise.snr_db > 0 (dB)");
  }
}

}  // namespace

SolverChoice parse_solver_choice(const std::string& text) {
  if (text == "vanilla") return SolverChoice::kVanilla;
  if (text == "simplified") return SolverChoice::kSimplified;
  if (text == "both") return SolverChoice::kBoth;
  throw ConfigError("solver must be one of vanilla|simplified|both, got '" + text + "'");
}

RunConfig default_config() {
  RunConfig config{default_setup()};
  return config;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const CliOverrides& overrides) {
  RunConfig config = default_config();
  if (path) apply_file(config, *path);
  if (overrides.seed) config.setup.master_seed = *overrides.seed;
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.jobs) config.setup.jobs = *overrides.jobs;
  if (overrides.trials) config.setup.trials = *overrides.trials;
  if (overrides.T) config.setup.T = *overrides.T;
  if (overrides.T_ini) config.T_ini = *overrides.T_ini;
  if (overrides.N) config.setup.N = *overrides.N;
  if (overrides.snr_db) config.snr_db = *overrides.snr_db;
  if (overrides.solver) config.solver = parse_solver_choice(*overrides.solver);
  if (overrides.label) config.label = *overrides.label;
  validate(config);
  return config;
}

}  // namespace iocforge::cli
