#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iocforge/forward_lq.hpp"
#include "iocforge/lti_data.hpp"
#include "iocforge/matstruct.hpp"

namespace iocforge {

// Scale-invariant weight error:
//   err = inf_{tau > 0} ||diag(Qh, Rh) tau - diag(Q, R)||_F / ||diag(Q, R)||_F
// computed in closed form; when the optimal tau is non-positive the infimum
// is the tau -> 0 limit and err = 1.
double estimation_error(const Mat& Q_hat, const Mat& R_hat, const Mat& Q, const Mat& R);

enum class SolverChoice { kVanilla, kSimplified, kBoth };
enum class NoiseTarget { kOnline, kOffline, kBoth };

// Common experiment fixture: the plant, the true weights, the optimal
// trajectory's initial state, data lengths, excitation level, and seeding.
struct ExperimentSetup {
  LtiSystem system;
  LqObjective weights;
  Vec initial_state;
  Index T = 50;
  Index N = 10;
  double excitation_amplitude = 1.0;
  std::uint64_t master_seed = 20260810;
  int trials = 15;
  int jobs = 1;
};

// Double integrator with full state output and mildly coupled output
// weights; the default fixture for the CLI, benchmarks and tests.
ExperimentSetup default_setup();

struct ExperimentRecord {
  std::string sweep_param_name;
  double sweep_param_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string solver_tag;
  double err = 0.0;       // NaN when the trial was not solvable
  double residual = 0.0;  // NaN when the trial was not solvable
  double wall_time_s = 0.0;
  bool identifiable = false;
  Index unknowns = 0;     // solver variable count (reported by the bench)
};

struct TiniSweepConfig {
  ExperimentSetup base;
  Index tini_min = 1;
  Index tini_max = 10;
  SolverChoice solvers = SolverChoice::kBoth;
  // Optional observation noise; infinity means noise-free (null-space
  // solvers). Finite values switch to the Rayleigh-quotient solvers.
  double snr_db = std::numeric_limits<double>::infinity();
  NoiseChannels noise_channels = NoiseChannels::kOutputs;
  NoiseTarget noise_target = NoiseTarget::kOnline;
};

struct NoiseSweepConfig {
  ExperimentSetup base;
  Index T_ini = 3;
  std::vector<double> snr_grid_db = {20.0, 30.0, 40.0, 50.0, 60.0};
  bool include_vanilla = false;
  NoiseChannels noise_channels = NoiseChannels::kOutputs;
  NoiseTarget noise_target = NoiseTarget::kOnline;
};

struct TimingBenchConfig {
  ExperimentSetup base;
  std::vector<Index> tini_grid = {3, 5, 7, 9, 11};
  int repetitions = 9;  // median over this many solves, one warmup discarded
};

struct PerturbationStudyConfig {
  ExperimentSetup base;
  Index T_ini = 3;
  std::vector<double> epsilons = {1e-4, 1e-6, 1e-8};
  int directions = 50;
};

struct PerturbationRecord {
  double epsilon = 0.0;
  std::uint64_t direction_seed = 0;
  double bound = 0.0;
  double actual = 0.0;
  double ratio = 0.0;
};

// Per initial-window length: fresh offline data, a fresh optimal trajectory,
// identifiability checks and the configured solver(s). Unidentifiable trials
// are flagged with err and residual absent (NaN). Pure function of
// (config, master seed): reruns match byte for byte, so the deterministic
// sweeps do not measure wall time (the bench does).
std::vector<ExperimentRecord> run_tini_sweep(const TiniSweepConfig& config);

// Per SNR level: noisy online trajectory, Rayleigh-quotient solver(s).
std::vector<ExperimentRecord> run_noise_sweep(const NoiseSweepConfig& config);

// Median wall time of the noisy solve call alone (assembly excluded) for
// both solver families across the T_ini grid, plus the variable counts that
// explain the scaling.
std::vector<ExperimentRecord> run_timing_bench(const TimingBenchConfig& config);

// First-order bound versus measured deviation over random perturbation
// directions of the optimal input.
std::vector<PerturbationRecord> run_perturbation_study(const PerturbationStudyConfig& config);

// CSV artifacts. Records are sorted by (value, trial, solver); doubles are
// written with 17 significant digits.
void write_records_csv(const std::vector<ExperimentRecord>& records,
                       const std::filesystem::path& path, bool bench_columns = false);
void write_perturbation_csv(const std::vector<PerturbationRecord>& records,
                            const std::filesystem::path& path);

// Static build/environment note recorded by the bench CSV.
std::string env_note();

}  // namespace iocforge
