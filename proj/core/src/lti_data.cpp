#include "iocforge/lti_data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iocforge/errors.hpp"
#include "iocforge/log.hpp"
#include "iocforge/rng.hpp"
#include "text_format.hpp"

namespace iocforge {

LtiSystem::LtiSystem(Mat A_in, Mat B_in, Mat C_in, Mat D_in, Index lag_bound_in)
    : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)), D(std::move(D_in)),
      lag_bound(lag_bound_in) {
  if (A.rows() != A.cols()) throw ContractViolation("LtiSystem: A must be square");
  const Index nn = A.rows();
  if (B.rows() != nn) throw ContractViolation("LtiSystem: B row count must match A");
  if (C.cols() != nn) throw ContractViolation("LtiSystem: C column count must match A");
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw ContractViolation("LtiSystem: D must be p x m");
  }
  if (nn < 1 || B.cols() < 1 || C.rows() < 1) {
    throw ContractViolation("LtiSystem: n, m, p must be positive");
  }
  require_finite(A, "LtiSystem.A");
  require_finite(B, "LtiSystem.B");
  require_finite(C, "LtiSystem.C");
  require_finite(D, "LtiSystem.D");
  if (lag_bound == 0) lag_bound = nn;  // n always bounds the lag
  if (lag_bound < 1 || lag_bound > nn) {
    throw ContractViolation("LtiSystem: lag_bound must be in [1, n]");
  }
}

Trajectory::Trajectory(Mat inputs_in, Mat outputs_in)
    : inputs(std::move(inputs_in)), outputs(std::move(outputs_in)) {
  if (inputs.cols() != outputs.cols()) {
    throw ContractViolation("Trajectory: inputs and outputs must have equal length");
  }
  require_finite(inputs, "Trajectory.inputs");
  require_finite(outputs, "Trajectory.outputs");
}

Vec Trajectory::stacked_inputs() const {
  return Eigen::Map<const Vec>(inputs.data(), inputs.size());
}

Vec Trajectory::stacked_outputs() const {
  return Eigen::Map<const Vec>(outputs.data(), outputs.size());
}

Mat Trajectory::interleaved() const {
  Mat w(m() + p(), length());
  w.topRows(m()) = inputs;
  w.bottomRows(p()) = outputs;
  return w;
}

Trajectory concatenate(const Trajectory& a, const Trajectory& b) {
  if (a.m() != b.m() || a.p() != b.p()) {
    throw ContractViolation("concatenate: channel counts differ");
  }
  Mat u(a.m(), a.length() + b.length());
  Mat y(a.p(), a.length() + b.length());
  u << a.inputs, b.inputs;
  y << a.outputs, b.outputs;
  return Trajectory(std::move(u), std::move(y));
}

Mat HankelBlocks::past_stack() const {
  Mat w(U_p.rows() + Y_p.rows(), U_p.cols());
  w << U_p, Y_p;
  return w;
}

Mat HankelBlocks::full_stack() const {
  Mat H(U_p.rows() + Y_p.rows() + U_f.rows() + Y_f.rows(), U_p.cols());
  H << U_p, Y_p, U_f, Y_f;
  return H;
}

Trajectory simulate(const LtiSystem& sys, const Vec& x0, const Mat& inputs) {
  if (x0.size() != sys.n()) throw ContractViolation("simulate: x0 dimension mismatch");
  if (inputs.rows() != sys.m()) throw ContractViolation("simulate: input dimension mismatch");
  require_finite(inputs, "simulate.inputs");
  const Index T = inputs.cols();
  Mat outputs(sys.p(), T);
  Vec x = x0;
  for (Index k = 0; k < T; ++k) {
    outputs.col(k) = sys.C * x + sys.D * inputs.col(k);
    x = sys.A * x + sys.B * inputs.col(k);
  }
  return Trajectory(inputs, std::move(outputs));
}

Mat random_excitation(Index m, Index T, double amplitude, std::uint64_t seed) {
  if (m < 1 || T < 1) throw ContractViolation("random_excitation: m and T must be positive");
  if (amplitude < 0.0) throw ContractViolation("random_excitation: amplitude must be >= 0");
  DeterministicRng rng(seed);
  Mat u(m, T);
  for (Index k = 0; k < T; ++k) {
    for (Index i = 0; i < m; ++i) {
      u(i, k) = rng.uniform(-amplitude, amplitude);
    }
  }
  return u;
}

Mat hankel(const Mat& signal, Index L) {
  const Index T = signal.cols();
  const Index q = signal.rows();
  if (L < 1) throw ContractViolation("hankel: depth must be positive");
  if (T < L) throw ContractViolation("hankel: signal shorter than depth");
  const Index M = T - L + 1;
  Mat H(q * L, M);
  for (Index i = 0; i < L; ++i) {
    H.middleRows(i * q, q) = signal.middleCols(i, M);
  }
  return H;
}

bool is_persistently_exciting(const Mat& inputs, Index L) {
  const Mat H = hankel(inputs, L);
  return numerical_rank(H).numerical_rank == H.rows();
}

PeReport check_generalized_pe(const Trajectory& w, Index L, Index n) {
  if (w.length() < L) throw ContractViolation("check_generalized_pe: trajectory shorter than L");
  PeReport report;
  report.rank = numerical_rank(hankel(w.interleaved(), L));
  report.expected_rank = w.m() * L + n;
  report.satisfied = report.rank.numerical_rank == report.expected_rank;
  return report;
}

std::pair<Trajectory, Trajectory> split_trajectory(const Trajectory& w, Index T_ini) {
  if (T_ini < 1 || T_ini >= w.length()) {
    throw ContractViolation("split_trajectory: need 1 <= T_ini < length");
  }
  const Index tail = w.length() - T_ini;
  Trajectory w_ini(w.inputs.leftCols(T_ini), w.outputs.leftCols(T_ini));
  Trajectory w_tail(w.inputs.rightCols(tail), w.outputs.rightCols(tail));
  return {std::move(w_ini), std::move(w_tail)};
}

HankelBlocks build_hankel_blocks(const Trajectory& w_d, Index T_ini, Index N) {
  if (T_ini < 1 || N < 1) throw ContractViolation("build_hankel_blocks: T_ini and N must be positive");
  const Index L = T_ini + N;
  if (w_d.length() < L) {
    throw ContractViolation("build_hankel_blocks: trajectory shorter than T_ini + N");
  }
  if (!is_persistently_exciting(w_d.inputs, L)) {
    log::warn("offline input is not persistently exciting of order " + std::to_string(L) +
              "; the data matrix may not represent the system");
  }
  const Mat Hu = hankel(w_d.inputs, L);
  const Mat Hy = hankel(w_d.outputs, L);
  HankelBlocks blocks;
  blocks.U_p = Hu.topRows(w_d.m() * T_ini);
  blocks.U_f = Hu.bottomRows(w_d.m() * N);
  blocks.Y_p = Hy.topRows(w_d.p() * T_ini);
  blocks.Y_f = Hy.bottomRows(w_d.p() * N);
  blocks.T_ini = T_ini;
  blocks.N = N;
  return blocks;
}

Trajectory add_observation_noise(const Trajectory& w, double snr_db, std::uint64_t seed,
                                 NoiseChannels channels) {
  if (std::isinf(snr_db) && snr_db > 0) return w;  // noise-free sentinel
  const bool noise_inputs = channels != NoiseChannels::kOutputs;
  const bool noise_outputs = channels != NoiseChannels::kInputs;
  DeterministicRng rng(seed);
  Mat u = w.inputs;
  Mat y = w.outputs;
  auto apply = [&](Mat& sig, const char* name) {
    for (Index i = 0; i < sig.rows(); ++i) {
      const double power = sig.row(i).squaredNorm() / static_cast<double>(sig.cols());
      if (power <= 0.0) {
        throw ContractViolation(std::string("add_observation_noise: zero-power ") + name +
                                " channel " + std::to_string(i));
      }
      const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
      for (Index k = 0; k < sig.cols(); ++k) {
        sig(i, k) += sigma * rng.gaussian();
      }
    }
  };
  if (noise_inputs) apply(u, "input");
  if (noise_outputs) apply(y, "output");
  return Trajectory(std::move(u), std::move(y));
}

void write_trajectory_csv(const Trajectory& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "k";
  for (Index i = 0; i < w.m(); ++i) out << ",u_" << i;
  for (Index i = 0; i < w.p(); ++i) out << ",y_" << i;
  out << "\n";
  for (Index k = 0; k < w.length(); ++k) {
    out << k;
    for (Index i = 0; i < w.m(); ++i) out << "," << detail::format_double(w.inputs(i, k));
    for (Index i = 0; i < w.p(); ++i) out << "," << detail::format_double(w.outputs(i, k));
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path.string());
  Index m = 0, p = 0;
  {
    std::stringstream header(line);
    std::string tok;
    bool first = true;
    while (std::getline(header, tok, ',')) {
      if (first) {
        if (tok != "k") throw std::runtime_error("bad trajectory header in " + path.string());
        first = false;
      } else if (tok.rfind("u_", 0) == 0) {
        ++m;
      } else if (tok.rfind("y_", 0) == 0) {
        ++p;
      } else {
        throw std::runtime_error("unexpected column '" + tok + "' in " + path.string());
      }
    }
  }
  if (m == 0 || p == 0) throw std::runtime_error("trajectory file lacks u/y columns: " + path.string());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string tok;
    std::vector<double> values;
    while (std::getline(row, tok, ',')) values.push_back(std::stod(tok));
    if (static_cast<Index>(values.size()) != 1 + m + p) {
      throw std::runtime_error("ragged row in " + path.string());
    }
    rows.push_back(std::move(values));
  }
  Mat u(m, static_cast<Index>(rows.size()));
  Mat y(p, static_cast<Index>(rows.size()));
  for (Index k = 0; k < static_cast<Index>(rows.size()); ++k) {
    for (Index i = 0; i < m; ++i) u(i, k) = rows[k][1 + i];
    for (Index i = 0; i < p; ++i) y(i, k) = rows[k][1 + m + i];
  }
  return Trajectory(std::move(u), std::move(y));
}

}  // namespace iocforge
