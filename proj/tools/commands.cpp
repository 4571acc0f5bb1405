#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "iocforge/errors.hpp"
#include "iocforge/estimate.hpp"
#include "iocforge/experiments.hpp"
#include "iocforge/ioc_simplified.hpp"
#include "iocforge/ioc_vanilla.hpp"
#include "iocforge/rng.hpp"

namespace iocforge::cli {

namespace {

// Matches the seed streams the sweep harness uses for its first grid point.
std::uint64_t excitation_seed(const RunConfig& config) {
  return derive_seed(config.setup.master_seed, 0, 0);
}
std::uint64_t online_noise_seed(const RunConfig& config) {
  return derive_seed(config.setup.master_seed, 1, 0);
}
std::uint64_t offline_noise_seed(const RunConfig& config) {
  return derive_seed(config.setup.master_seed, 2, 0);
}

Trajectory make_offline_data(const RunConfig& config) {
  const auto& setup = config.setup;
  Trajectory w_d = simulate(setup.system, Vec::Zero(setup.system.n()),
                            random_excitation(setup.system.m(), setup.T,
                                              setup.excitation_amplitude,
                                              excitation_seed(config)));
  if (config.snr_db && config.noise_target != NoiseTarget::kOnline) {
    w_d = add_observation_noise(w_d, *config.snr_db, offline_noise_seed(config),
                                config.noise_channels);
  }
  return w_d;
}

Trajectory make_optimal_data(const RunConfig& config, bool apply_noise) {
  const auto& setup = config.setup;
  Trajectory w_o = lq_oracle(setup.system, setup.weights, setup.initial_state,
                             config.T_ini + setup.N);
  if (apply_noise && config.snr_db && config.noise_target != NoiseTarget::kOffline) {
    w_o = add_observation_noise(w_o, *config.snr_db, online_noise_seed(config),
                                config.noise_channels);
  }
  return w_o;
}

std::filesystem::path prepare_output_dir(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  return config.output_dir;
}

void print_summary_by_param(const std::vector<ExperimentRecord>& records) {
  // mean/variance of err per (param value, solver), unidentifiable trials skipped
  std::map<std::pair<double, std::string>, std::vector<double>> buckets;
  std::map<std::pair<double, std::string>, int> dropped;
  for (const auto& record : records) {
    const auto key = std::make_pair(record.sweep_param_value, record.solver_tag);
    if (std::isnan(record.err)) {
      ++dropped[key];
    } else {
      buckets[key].push_back(record.err);
    }
  }
  for (const auto& [key, errors] : buckets) {
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= static_cast<double>(errors.size());
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    if (errors.size() > 1) var /= static_cast<double>(errors.size() - 1);
    std::printf("  %-22s %8g  n=%2zu  mean_err=%.3e  var=%.3e  unsolved=%d\n",
                key.second.c_str(), key.first, errors.size(), mean, var,
                dropped.count(key) ? dropped[key] : 0);
  }
  for (const auto& [key, count] : dropped) {
    if (!buckets.count(key)) {
      std::printf("  %-22s %8g  n= 0  all %d trial(s) unidentifiable\n", key.second.c_str(),
                  key.first, count);
    }
  }
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  const auto out_dir = prepare_output_dir(config);
  const Trajectory w_d = make_offline_data(config);
  const auto path = out_dir / ("wd_" + config.artifact_label() + ".csv");
  write_trajectory_csv(w_d, path);

  const Index L = config.T_ini + config.setup.N;
  const auto pe = check_generalized_pe(w_d, L, config.setup.system.n());
  std::printf("offline trajectory: T=%lld, m=%lld, p=%lld -> %s\n",
              static_cast<long long>(w_d.length()), static_cast<long long>(w_d.m()),
              static_cast<long long>(w_d.p()), path.c_str());
  std::printf("input excitation of order %lld: %s\n", static_cast<long long>(L),
              is_persistently_exciting(w_d.inputs, L) ? "yes" : "NO");
  std::printf("combined Hankel rank at depth %lld: %lld (m*L+n = %lld) -> %s\n",
              static_cast<long long>(L), static_cast<long long>(pe.rank.numerical_rank),
              static_cast<long long>(pe.expected_rank),
              pe.satisfied ? "represents the system" : "does NOT represent the system");
  return kExitOk;
}

int cmd_forward(const RunConfig& config, const std::string& method) {
  const auto out_dir = prepare_output_dir(config);
  const Trajectory w_o = make_optimal_data(config, /*apply_noise=*/false);
  const Vec u_full = w_o.stacked_inputs();
  const Vec y_full = w_o.stacked_outputs();

  if (method == "oracle") {
    const auto path = out_dir / ("wo_" + config.artifact_label() + ".csv");
    write_trajectory_csv(w_o, path);
    std::printf("optimal trajectory over %lld steps -> %s\n",
                static_cast<long long>(w_o.length()), path.c_str());
    std::printf("cost: %.17g\n", lq_cost(config.setup.weights, u_full, y_full));
    return kExitOk;
  }
  if (method != "data-enabled") {
    throw ConfigError("forward --method must be oracle|data-enabled, got '" + method + "'");
  }

  const Trajectory w_d = make_offline_data(config);
  const auto blocks = build_hankel_blocks(w_d, config.T_ini, config.setup.N);
  auto [w_ini, w_tail] = split_trajectory(w_o, config.T_ini);
  const auto solution = data_enabled_lq(blocks, w_ini, config.setup.weights);

  const Index m = w_o.m(), p = w_o.p(), N = config.setup.N;
  Trajectory tail(Eigen::Map<const Mat>(solution.u.data(), m, N),
                  Eigen::Map<const Mat>(solution.y.data(), p, N));
  const Trajectory combined = concatenate(w_ini, tail);
  const auto path = out_dir / ("wo_data_enabled_" + config.artifact_label() + ".csv");
  write_trajectory_csv(combined, path);

  const double du = (solution.u - w_tail.stacked_inputs()).cwiseAbs().maxCoeff();
  const double dy = (solution.y - w_tail.stacked_outputs()).cwiseAbs().maxCoeff();
  std::printf("data-enabled optimal trajectory -> %s\n", path.c_str());
  std::printf("cost: %.17g\n", solution.cost);
  std::printf("max deviation from the model-based oracle tail: u %.3e, y %.3e\n", du, dy);
  return kExitOk;
}

int cmd_invert(const RunConfig& config, bool noisy,
               const std::optional<std::filesystem::path>& data_path,
               const std::optional<std::filesystem::path>& optimal_path) {
  const auto out_dir = prepare_output_dir(config);
  const bool noisy_mode = noisy || config.snr_db.has_value();

  const Trajectory w_d = data_path ? read_trajectory_csv(*data_path) : make_offline_data(config);
  const Trajectory w_o =
      optimal_path ? read_trajectory_csv(*optimal_path) : make_optimal_data(config, true);
  if (w_o.length() <= config.T_ini) {
    throw ConfigError("constraint violated: optimal trajectory longer than T_ini");
  }

  const auto blocks = build_hankel_blocks(w_d, config.T_ini, w_o.length() - config.T_ini);
  auto [w_ini, w_tail] = split_trajectory(w_o, config.T_ini);
  Vec z_ini(w_ini.inputs.size() + w_ini.outputs.size());
  z_ini << w_ini.stacked_inputs(), w_ini.stacked_outputs();

  int exit_code = kExitOk;
  auto report = [&](const WeightEstimate& estimate) {
    const auto path =
        out_dir / ("weights_" + to_string(estimate.tag) + "_" + config.artifact_label() + ".txt");
    write_weight_estimate(estimate, path);
    const double err = estimation_error(estimate.Q_hat, estimate.R_hat, config.setup.weights.Q,
                                        config.setup.weights.R);
    std::printf("%s: residual=%.3e err_vs_configured_weights=%.3e -> %s\n",
                to_string(estimate.tag).c_str(), estimate.residual, err, path.c_str());
    if (estimate.alpha) std::printf("  condition number alpha: %.17g\n", *estimate.alpha);
  };

  if (config.solver != SolverChoice::kSimplified) {
    const auto sm = assemble_psi_tilde(blocks, w_tail.stacked_inputs(), w_tail.stacked_outputs());
    const auto id = check_identifiability_vanilla(sm);
    std::printf("vanilla rank %lld of %lld (required %lld) -> %s\n",
                static_cast<long long>(id.rank.numerical_rank),
                static_cast<long long>(id.column_count),
                static_cast<long long>(id.required_rank),
                id.identifiable ? "identifiable" : "not identifiable");
    if (noisy_mode) {
      report(solve_noisy_vanilla(sm));
    } else if (id.identifiable) {
      report(solve_noiseless_vanilla(sm));
    } else {
      exit_code = kExitUnidentifiable;
    }
  }
  if (config.solver != SolverChoice::kVanilla) {
    const auto cp = compute_condensed_predictor(blocks);
    const auto sm = assemble_phi_tilde(cp, z_ini, w_tail.stacked_inputs());
    const auto id = check_identifiability_simplified(sm);
    std::printf("simplified rank %lld of %lld (required %lld) -> %s\n",
                static_cast<long long>(id.rank.numerical_rank),
                static_cast<long long>(id.column_count),
                static_cast<long long>(id.required_rank),
                id.identifiable ? "identifiable" : "not identifiable");
    if (noisy_mode) {
      report(solve_noisy_simplified(sm));
    } else if (id.identifiable) {
      report(solve_noiseless_simplified(sm));
    } else {
      exit_code = kExitUnidentifiable;
    }
  }
  return exit_code;
}

int cmd_check_id(const RunConfig& config, const std::string& mode) {
  const Index m = config.setup.system.m(), p = config.setup.system.p();
  if (mode == "horizon" || mode == "simplified") {
    if (!check_horizon(m, p, config.setup.N)) {
      const double threshold =
          static_cast<double>(m * m + m + p * p + p - 2) / static_cast<double>(2 * m);
      std::printf("horizon N=%lld is below the identifiability threshold (need N >= %g for "
                  "m=%lld, p=%lld): weights cannot be identified\n",
                  static_cast<long long>(config.setup.N), std::ceil(threshold),
                  static_cast<long long>(m), static_cast<long long>(p));
      return kExitUnidentifiable;
    }
    if (mode == "horizon") {
      std::printf("horizon N=%lld admits identification for m=%lld, p=%lld\n",
                  static_cast<long long>(config.setup.N), static_cast<long long>(m),
                  static_cast<long long>(p));
      return kExitOk;
    }
  }

  const Trajectory w_d = make_offline_data(config);
  const Trajectory w_o = make_optimal_data(config, true);
  const auto blocks = build_hankel_blocks(w_d, config.T_ini, config.setup.N);
  auto [w_ini, w_tail] = split_trajectory(w_o, config.T_ini);

  IdentifiabilityReport id;
  if (mode == "vanilla") {
    id = check_identifiability_vanilla(
        assemble_psi_tilde(blocks, w_tail.stacked_inputs(), w_tail.stacked_outputs()));
    if (id.degenerate_costate_dims > 0) {
      std::printf("past block is row-rank deficient: %lld costate direction(s) never "
                  "constrain the weights; required rank adjusted accordingly\n",
                  static_cast<long long>(id.degenerate_costate_dims));
    }
  } else if (mode == "simplified") {
    Vec z_ini(w_ini.inputs.size() + w_ini.outputs.size());
    z_ini << w_ini.stacked_inputs(), w_ini.stacked_outputs();
    id = check_identifiability_simplified(
        assemble_phi_tilde(compute_condensed_predictor(blocks), z_ini,
                           w_tail.stacked_inputs()));
  } else {
    throw ConfigError("check-id --mode must be vanilla|simplified|horizon, got '" + mode + "'");
  }
  std::printf("%s rank: %lld of %lld columns (required %lld) -> %s\n", mode.c_str(),
              static_cast<long long>(id.rank.numerical_rank),
              static_cast<long long>(id.column_count),
              static_cast<long long>(id.required_rank),
              id.identifiable ? "identifiable" : "NOT identifiable");
  return id.identifiable ? kExitOk : kExitUnidentifiable;
}

int cmd_sweep_tini(const RunConfig& config) {
  const auto out_dir = prepare_output_dir(config);
  TiniSweepConfig sweep{config.setup};
  sweep.tini_min = config.tini_min;
  sweep.tini_max = config.tini_max;
  sweep.solvers = config.solver;
  if (config.snr_db) sweep.snr_db = *config.snr_db;
  sweep.noise_channels = config.noise_channels;
  sweep.noise_target = config.noise_target;

  const auto records = run_tini_sweep(sweep);
  const auto path = out_dir / ("tini_" + config.artifact_label() + ".csv");
  write_records_csv(records, path);
  std::printf("T_ini sweep (%zu records) -> %s\n", records.size(), path.c_str());
  print_summary_by_param(records);
  return kExitOk;
}

int cmd_sweep_noise(const RunConfig& config) {
  const auto out_dir = prepare_output_dir(config);
  NoiseSweepConfig sweep{config.setup};
  sweep.T_ini = config.T_ini;
  sweep.snr_grid_db = config.snr_grid_db;
  sweep.include_vanilla = config.solver != SolverChoice::kSimplified;
  sweep.noise_channels = config.noise_channels;
  sweep.noise_target = config.noise_target;

  const auto records = run_noise_sweep(sweep);
  const auto path = out_dir / ("noise_" + config.artifact_label() + ".csv");
  write_records_csv(records, path);
  std::printf("noise sweep (%zu records) -> %s\n", records.size(), path.c_str());
  print_summary_by_param(records);
  return kExitOk;
}

int cmd_bench(const RunConfig& config) {
  const auto out_dir = prepare_output_dir(config);
  TimingBenchConfig bench{config.setup};
  bench.tini_grid = config.bench_tini_grid;

  const auto records = run_timing_bench(bench);
  const auto path = out_dir / ("bench_" + config.artifact_label() + ".csv");
  write_records_csv(records, path, /*bench_columns=*/true);
  std::printf("timing bench -> %s\n", path.c_str());
  std::printf("%8s  %-18s %10s  %12s\n", "T_ini", "solver", "unknowns", "median_s");
  for (const auto& record : records) {
    std::printf("%8g  %-18s %10lld  %12.6f\n", record.sweep_param_value,
                record.solver_tag.c_str(), static_cast<long long>(record.unknowns),
                record.wall_time_s);
  }
  return kExitOk;
}

}  // namespace iocforge::cli
