#include "iocforge/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "iocforge/errors.hpp"
#include "iocforge/estimate.hpp"
#include "iocforge/ioc_simplified.hpp"
#include "iocforge/ioc_vanilla.hpp"
#include "iocforge/log.hpp"
#include "iocforge/perturbation.hpp"
#include "iocforge/rng.hpp"
#include "text_format.hpp"

namespace iocforge {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Mat block_diag(const Mat& A, const Mat& B) {
  Mat out = Mat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  out.topLeftCorner(A.rows(), A.cols()) = A;
  out.bottomRightCorner(B.rows(), B.cols()) = B;
  return out;
}

// Seed streams per sweep point, kept distinct so concurrent trials never
// collide and noising the data does not disturb the excitation draw.
enum SeedStream : std::uint64_t { kExcitation = 0, kOnlineNoise = 1, kOfflineNoise = 2 };

std::uint64_t stream_seed(const ExperimentSetup& base, Index param_index, SeedStream stream,
                          int trial) {
  return derive_seed(base.master_seed, 3 * static_cast<std::uint64_t>(param_index) + stream,
                     static_cast<std::uint64_t>(trial));
}

void parallel_for(int jobs, Index task_count, const std::function<void(Index)>& body) {
  if (jobs <= 1 || task_count <= 1) {
    for (Index t = 0; t < task_count; ++t) body(t);
    return;
  }
  std::atomic<Index> next{0};
  const int worker_count = std::min<Index>(jobs, task_count);
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (int w = 0; w < worker_count; ++w) {
    workers.emplace_back([&]() {
      while (true) {
        const Index t = next.fetch_add(1);
        if (t >= task_count) return;
        body(t);
      }
    });
  }
  for (auto& worker : workers) worker.join();
}

struct TrialData {
  HankelBlocks blocks;
  Trajectory w_ini;
  Trajectory w_tail;
  Vec z_ini;
};

TrialData prepare_trial(const ExperimentSetup& base, Index T_ini, Index param_index, int trial,
                        double snr_db, NoiseChannels channels, NoiseTarget target) {
  const bool noisy = std::isfinite(snr_db);
  Trajectory w_d = simulate(base.system, Vec::Zero(base.system.n()),
                            random_excitation(base.system.m(), base.T,
                                              base.excitation_amplitude,
                                              stream_seed(base, param_index, kExcitation, trial)));
  if (noisy && target != NoiseTarget::kOnline) {
    w_d = add_observation_noise(w_d, snr_db,
                                stream_seed(base, param_index, kOfflineNoise, trial), channels);
  }
  Trajectory w_o = lq_oracle(base.system, base.weights, base.initial_state, T_ini + base.N);
  if (noisy && target != NoiseTarget::kOffline) {
    w_o = add_observation_noise(w_o, snr_db,
                                stream_seed(base, param_index, kOnlineNoise, trial), channels);
  }
  auto [w_ini, w_tail] = split_trajectory(w_o, T_ini);
  Vec z_ini(w_ini.inputs.size() + w_ini.outputs.size());
  z_ini << w_ini.stacked_inputs(), w_ini.stacked_outputs();
  return TrialData{build_hankel_blocks(w_d, T_ini, base.N), std::move(w_ini),
                   std::move(w_tail), std::move(z_ini)};
}

ExperimentRecord solve_one(const ExperimentSetup& base, const TrialData& data, bool vanilla,
                           bool noisy) {
  ExperimentRecord record;
  record.err = kNan;
  record.residual = kNan;
  try {
    if (vanilla) {
      const auto sm = assemble_psi_tilde(data.blocks, data.w_tail.stacked_inputs(),
                                         data.w_tail.stacked_outputs());
      record.unknowns = sm.psi_tilde.cols();
      record.identifiable = check_identifiability_vanilla(sm).identifiable;
      if (noisy) {
        const auto estimate = solve_noisy_vanilla(sm);
        record.err = estimation_error(estimate.Q_hat, estimate.R_hat, base.weights.Q,
                                      base.weights.R);
        record.residual = estimate.residual;
        record.solver_tag = to_string(estimate.tag);
      } else {
        record.solver_tag = to_string(SolverTag::kNoiselessVanilla);
        if (record.identifiable) {
          const auto estimate = solve_noiseless_vanilla(sm);
          record.err = estimation_error(estimate.Q_hat, estimate.R_hat, base.weights.Q,
                                        base.weights.R);
          record.residual = estimate.residual;
        }
      }
    } else {
      const auto cp = compute_condensed_predictor(data.blocks);
      const auto sm = assemble_phi_tilde(cp, data.z_ini, data.w_tail.stacked_inputs());
      record.unknowns = sm.phi_tilde.cols();
      record.identifiable = check_identifiability_simplified(sm).identifiable;
      if (noisy) {
        const auto estimate = solve_noisy_simplified(sm);
        record.err = estimation_error(estimate.Q_hat, estimate.R_hat, base.weights.Q,
                                      base.weights.R);
        record.residual = estimate.residual;
        record.solver_tag = to_string(estimate.tag);
      } else {
        record.solver_tag = to_string(SolverTag::kNoiselessSimplified);
        if (record.identifiable) {
          const auto estimate = solve_noiseless_simplified(sm);
          record.err = estimation_error(estimate.Q_hat, estimate.R_hat, base.weights.Q,
                                        base.weights.R);
          record.residual = estimate.residual;
        }
      }
    }
  } catch (const UnidentifiableError&) {
    record.identifiable = false;
  } catch (const InconsistentDataError& e) {
    log::warn(std::string("trial produced an inconsistent weight ray: ") + e.what());
  }
  return record;
}

}  // namespace

double estimation_error(const Mat& Q_hat, const Mat& R_hat, const Mat& Q, const Mat& R) {
  if (Q_hat.rows() != Q.rows() || Q_hat.cols() != Q.cols() || R_hat.rows() != R.rows() ||
      R_hat.cols() != R.cols()) {
    throw ContractViolation("estimation_error: dimension mismatch");
  }
  const Mat X_hat = block_diag(Q_hat, R_hat);
  const Mat X = block_diag(Q, R);
  const double hat_norm_sq = X_hat.squaredNorm();
  if (hat_norm_sq <= 0.0) throw ContractViolation("estimation_error: zero estimate");
  const double tau = (X_hat.array() * X.array()).sum() / hat_norm_sq;
  if (tau <= 0.0) return 1.0;  // infimum over tau > 0 approached at tau -> 0+
  return (tau * X_hat - X).norm() / X.norm();
}

ExperimentSetup default_setup() {
  Mat A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << 1.0, 1.0, 0.0, 1.0;
  B << 0.0, 1.0;
  Q << 1.0, 0.2, 0.2, 0.8;
  R << 0.4;
  Vec x0(2);
  x0 << -3.5, 0.0;
  return ExperimentSetup{LtiSystem(A, B, Mat::Identity(2, 2), Mat::Zero(2, 1)),
                         LqObjective(Q, R), x0};
}

std::vector<ExperimentRecord> run_tini_sweep(const TiniSweepConfig& config) {
  if (config.tini_min < 1 || config.tini_max < config.tini_min) {
    throw ContractViolation("run_tini_sweep: bad T_ini range");
  }
  const bool noisy = std::isfinite(config.snr_db);
  const bool want_vanilla = config.solvers != SolverChoice::kSimplified;
  const bool want_simplified = config.solvers != SolverChoice::kVanilla;
  const Index param_count = config.tini_max - config.tini_min + 1;
  const Index per_trial = (want_vanilla ? 1 : 0) + (want_simplified ? 1 : 0);
  std::vector<ExperimentRecord> records(param_count * config.base.trials * per_trial);

  parallel_for(config.base.jobs, param_count * config.base.trials, [&](Index task) {
    const Index param_index = task / config.base.trials;
    const int trial = static_cast<int>(task % config.base.trials);
    const Index T_ini = config.tini_min + param_index;
    const auto data = prepare_trial(config.base, T_ini, param_index, trial, config.snr_db,
                                    config.noise_channels, config.noise_target);
    Index slot = task * per_trial;
    auto emit = [&](bool vanilla) {
      ExperimentRecord record = solve_one(config.base, data, vanilla, noisy);
      record.sweep_param_name = "T_ini";
      record.sweep_param_value = static_cast<double>(T_ini);
      record.trial = trial;
      record.seed = stream_seed(config.base, param_index, kExcitation, trial);
      records[slot++] = std::move(record);
    };
    if (want_vanilla) emit(true);
    if (want_simplified) emit(false);
  });
  return records;
}

std::vector<ExperimentRecord> run_noise_sweep(const NoiseSweepConfig& config) {
  if (config.snr_grid_db.empty()) throw ContractViolation("run_noise_sweep: empty SNR grid");
  const Index param_count = static_cast<Index>(config.snr_grid_db.size());
  const Index per_trial = config.include_vanilla ? 2 : 1;
  std::vector<ExperimentRecord> records(param_count * config.base.trials * per_trial);

  parallel_for(config.base.jobs, param_count * config.base.trials, [&](Index task) {
    const Index param_index = task / config.base.trials;
    const int trial = static_cast<int>(task % config.base.trials);
    const double snr_db = config.snr_grid_db[param_index];
    const bool noisy = std::isfinite(snr_db);
    const auto data = prepare_trial(config.base, config.T_ini, param_index, trial, snr_db,
                                    config.noise_channels, config.noise_target);
    Index slot = task * per_trial;
    auto emit = [&](bool vanilla) {
      ExperimentRecord record = solve_one(config.base, data, vanilla, noisy);
      record.sweep_param_name = "snr_db";
      record.sweep_param_value = snr_db;
      record.trial = trial;
      record.seed = stream_seed(config.base, param_index, kOnlineNoise, trial);
      records[slot++] = std::move(record);
    };
    emit(false);
    if (config.include_vanilla) emit(true);
  });
  return records;
}

std::vector<ExperimentRecord> run_timing_bench(const TimingBenchConfig& config) {
  if (config.repetitions < 5) {
    throw ContractViolation("run_timing_bench: need at least 5 repetitions");
  }
  std::vector<ExperimentRecord> records;
  const std::string note = env_note();
  for (Index param_index = 0; param_index < static_cast<Index>(config.tini_grid.size());
       ++param_index) {
    const Index T_ini = config.tini_grid[param_index];
    const auto data = prepare_trial(config.base, T_ini, param_index, 0,
                                    std::numeric_limits<double>::infinity(),
                                    NoiseChannels::kOutputs, NoiseTarget::kOnline);
    const auto psi = assemble_psi_tilde(data.blocks, data.w_tail.stacked_inputs(),
                                        data.w_tail.stacked_outputs());
    const auto cp = compute_condensed_predictor(data.blocks);
    const auto phi = assemble_phi_tilde(cp, data.z_ini, data.w_tail.stacked_inputs());

    auto median_time = [&](auto&& solve) {
      (void)solve();  // warmup, discarded
      std::vector<double> times(config.repetitions);
      for (int r = 0; r < config.repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        (void)solve();
        const auto stop = std::chrono::steady_clock::now();
        times[r] = std::chrono::duration<double>(stop - start).count();
      }
      std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
      return times[times.size() / 2];
    };

    auto make_record = [&](const WeightEstimate& estimate, double seconds, Index unknowns,
                           bool identifiable) {
      ExperimentRecord record;
      record.sweep_param_name = "T_ini";
      record.sweep_param_value = static_cast<double>(T_ini);
      record.trial = 0;
      record.seed = stream_seed(config.base, param_index, kExcitation, 0);
      record.solver_tag = to_string(estimate.tag);
      record.err = estimation_error(estimate.Q_hat, estimate.R_hat, config.base.weights.Q,
                                    config.base.weights.R);
      record.residual = estimate.residual;
      record.wall_time_s = seconds;
      record.identifiable = identifiable;
      record.unknowns = unknowns;
      return record;
    };

    const double vanilla_time = median_time([&] { return solve_noisy_vanilla(psi); });
    records.push_back(make_record(solve_noisy_vanilla(psi), vanilla_time, psi.psi_tilde.cols(),
                                  check_identifiability_vanilla(psi).identifiable));
    const double simplified_time = median_time([&] { return solve_noisy_simplified(phi); });
    records.push_back(make_record(solve_noisy_simplified(phi), simplified_time,
                                  phi.phi_tilde.cols(),
                                  check_identifiability_simplified(phi).identifiable));
  }
  return records;
}

std::vector<PerturbationRecord> run_perturbation_study(const PerturbationStudyConfig& config) {
  const auto data = prepare_trial(config.base, config.T_ini, 0, 0,
                                  std::numeric_limits<double>::infinity(),
                                  NoiseChannels::kOutputs, NoiseTarget::kOnline);
  const auto cp = compute_condensed_predictor(data.blocks);
  const Vec u_tilde = data.w_tail.stacked_inputs();
  const auto sm = assemble_phi_tilde(cp, data.z_ini, u_tilde);

  std::vector<PerturbationRecord> records;
  records.reserve(config.epsilons.size() * config.directions);
  for (Index eps_index = 0; eps_index < static_cast<Index>(config.epsilons.size());
       ++eps_index) {
    const double epsilon = config.epsilons[eps_index];
    for (int d = 0; d < config.directions; ++d) {
      const std::uint64_t seed = derive_seed(config.base.master_seed,
                                             1000 + static_cast<std::uint64_t>(eps_index),
                                             static_cast<std::uint64_t>(d));
      DeterministicRng rng(seed);
      Vec direction(u_tilde.size());
      for (Index i = 0; i < direction.size(); ++i) direction[i] = rng.gaussian();
      direction.normalize();
      const Vec delta_u = epsilon * u_tilde.norm() * direction;
      const auto report = perturbation_bound(sm, delta_phi_tilde(cp, delta_u));
      PerturbationRecord record;
      record.epsilon = epsilon;
      record.direction_seed = seed;
      record.bound = report.bound;
      record.actual = report.actual_deviation.value_or(kNan);
      record.ratio = report.bound > 0.0 ? record.actual / report.bound : kNan;
      records.push_back(record);
    }
  }
  return records;
}

void write_records_csv(const std::vector<ExperimentRecord>& records,
                       const std::filesystem::path& path, bool bench_columns) {
  std::vector<ExperimentRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.sweep_param_value != b.sweep_param_value) {
      return a.sweep_param_value < b.sweep_param_value;
    }
    if (a.trial != b.trial) return a.trial < b.trial;
    return a.solver_tag < b.solver_tag;
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "sweep_param,value,trial,seed,solver,err,residual,wall_time_s,identifiable";
  if (bench_columns) out << ",unknowns,env_note";
  out << "\n";
  const std::string note = env_note();
  for (const auto& record : sorted) {
    out << record.sweep_param_name << ',' << detail::format_double(record.sweep_param_value)
        << ',' << record.trial << ',' << record.seed << ',' << record.solver_tag << ','
        << detail::format_double(record.err) << ',' << detail::format_double(record.residual)
        << ',' << detail::format_double(record.wall_time_s) << ','
        << (record.identifiable ? 1 : 0);
    if (bench_columns) out << ',' << record.unknowns << ',' << note;
    out << "\n";
  }
}

void write_perturbation_csv(const std::vector<PerturbationRecord>& records,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "epsilon,direction_seed,bound,actual,ratio\n";
  for (const auto& record : records) {
    out << detail::format_double(record.epsilon) << ',' << record.direction_seed << ','
        << detail::format_double(record.bound) << ',' << detail::format_double(record.actual)
        << ',' << detail::format_double(record.ratio) << "\n";
  }
}

std::string env_note() {
#if defined(__clang__)
  std::string compiler = "clang-" __clang_version__;
#elif defined(__GNUC__)
  std::string compiler = "gcc-" __VERSION__;
#else
  std::string compiler = "unknown-compiler";
#endif
#ifdef NDEBUG
  const char* build = "release";
#else
  const char* build = "debug";
#endif
  // Commas would break the CSV; keep the note to a single field.
  std::string note = compiler + ";" + build;
  std::replace(note.begin(), note.end(), ',', ';');
  std::replace(note.begin(), note.end(), ' ', '_');
  return note;
}

}  // namespace iocforge
