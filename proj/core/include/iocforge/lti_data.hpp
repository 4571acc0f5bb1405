#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "iocforge/matstruct.hpp"

namespace iocforge {

// Discrete-time LTI system x+ = A x + B u, y = C x + D u, used only for data
// generation and test oracles; the inverse solvers never see it.
struct LtiSystem {
  Mat A, B, C, D;
  Index lag_bound;  // upper bound on the system lag, at most n

  LtiSystem(Mat A_in, Mat B_in, Mat C_in, Mat D_in, Index lag_bound_in = 0);

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }
};

// Paired input/output sequences of equal length; column k holds the sample
// at time k.
struct Trajectory {
  Mat inputs;   // m x length
  Mat outputs;  // p x length

  Trajectory(Mat inputs_in, Mat outputs_in);

  Index length() const { return inputs.cols(); }
  Index m() const { return inputs.rows(); }
  Index p() const { return outputs.rows(); }

  // col(u_0, ..., u_{T-1}) and col(y_0, ..., y_{T-1}).
  Vec stacked_inputs() const;
  Vec stacked_outputs() const;

  // (m+p) x length matrix whose column k is col(u_k, y_k).
  Mat interleaved() const;
};

Trajectory concatenate(const Trajectory& a, const Trajectory& b);

// The offline data matrix col(U_p, Y_p, U_f, Y_f): a row permutation of the
// order-(T_ini+N) Hankel matrix of the interleaved offline trajectory.
struct HankelBlocks {
  Mat U_p, Y_p, U_f, Y_f;
  Index T_ini = 0;
  Index N = 0;

  Index m() const { return T_ini > 0 ? U_p.rows() / T_ini : 0; }
  Index p() const { return T_ini > 0 ? Y_p.rows() / T_ini : 0; }
  Index num_cols() const { return U_p.cols(); }

  // col(U_p, Y_p) -- the past block the costate multiplies.
  Mat past_stack() const;
  // col(U_p, Y_p, U_f, Y_f).
  Mat full_stack() const;
};

// Simulates the system from x0 under the given input columns.
Trajectory simulate(const LtiSystem& sys, const Vec& x0, const Mat& inputs);

// i.i.d. uniform excitation on [-amplitude, amplitude], reproducible from
// the seed.
Mat random_excitation(Index m, Index T, double amplitude, std::uint64_t seed);

// Block Hankel matrix of depth L: column j stacks signal columns j..j+L-1.
Mat hankel(const Mat& signal, Index L);

// Persistency of excitation of order L: the depth-L input Hankel matrix has
// full row rank.
bool is_persistently_exciting(const Mat& inputs, Index L);

struct PeReport {
  bool satisfied = false;
  RankReport rank;
  Index expected_rank = 0;  // m*L + n
};

// Generalized persistency of excitation: rank of the depth-L Hankel of the
// interleaved trajectory equals m*L + n.
PeReport check_generalized_pe(const Trajectory& w, Index L, Index n);

// Splits into the first T_ini steps and the remaining tail.
std::pair<Trajectory, Trajectory> split_trajectory(const Trajectory& w, Index T_ini);

// Builds the offline data matrix. Warns (via log) when the input fails the
// order-(T_ini+N) excitation check; the generalized condition needs the
// state dimension, which is unknown model-free.
HankelBlocks build_hankel_blocks(const Trajectory& w_d, Index T_ini, Index N);

enum class NoiseChannels { kInputs, kOutputs, kBoth };

// Adds i.i.d. zero-mean Gaussian noise to the selected channels, scaled per
// scalar channel so that 10*log10(signal power / noise power) = snr_db.
// An infinite snr_db returns the trajectory unchanged.
Trajectory add_observation_noise(const Trajectory& w, double snr_db, std::uint64_t seed,
                                 NoiseChannels channels);

// Plain-text CSV with header k,u_0..u_{m-1},y_0..y_{p-1} and full double
// precision (17 significant digits).
void write_trajectory_csv(const Trajectory& w, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace iocforge
