#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "iocforge/matstruct.hpp"

namespace iocforge {

enum class SolverTag {
  kNoiselessVanilla,
  kNoisyVanilla,
  kNoiselessSimplified,
  kNoisySimplified,
};

std::string to_string(SolverTag tag);
SolverTag parse_solver_tag(const std::string& text);

// Recovered weights. Noiseless solvers rescale so the smallest eigenvalue of
// diag(Q_hat, R_hat) is 1 and report the achieved condition number as alpha;
// noisy solvers return the raw unit-norm minimizer and leave alpha empty.
struct WeightEstimate {
  Mat Q_hat;
  Mat R_hat;
  std::optional<Vec> lambda_ini;
  std::optional<double> alpha;
  double residual = 0.0;
  SolverTag tag = SolverTag::kNoiselessVanilla;
};

// Relative singular-value threshold (times sigma_max) used by the
// identifiability checks. The assembled system matrices carry accumulated
// pipeline rounding around 1e-12 * sigma_max on exact data, while any real
// observation noise lands orders of magnitude higher; sqrt(eps)-level
// separates the two regimes. Overridable per call.
inline constexpr double kIdentifiabilityRankTol = 1e-8;

struct IdentifiabilityReport {
  bool identifiable = false;
  RankReport rank;            // of the assembled system matrix
  Index column_count = 0;
  Index required_rank = 0;    // rank at which the weight ray is one-dimensional
  // Rank deficiency of the past block col(U_p, Y_p): costate directions that
  // annihilate the system matrix for any data and therefore never constrain
  // the weights (zero for the simplified solver).
  Index degenerate_costate_dims = 0;
};

// Key-value text document with fields solver_tag, Q, R (row-major),
// lambda_ini (optional), alpha (optional), residual.
void write_weight_estimate(const WeightEstimate& estimate, const std::filesystem::path& path);
WeightEstimate read_weight_estimate(const std::filesystem::path& path);

}  // namespace iocforge
