#pragma once

// Shared finishing steps for the null-space and Rayleigh-quotient weight
// solvers: parameter splitting, sign convention, PSD validation and the
// smallest-eigenvalue normalization.

#include <string>

#include <Eigen/Dense>

#include "iocforge/errors.hpp"
#include "iocforge/estimate.hpp"
#include "iocforge/matstruct.hpp"

namespace iocforge::detail {

inline RankReport rank_at_relative_tol(const Mat& M, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(M);
  RankReport report;
  report.singular_values = svd.singularValues();
  const double sigma_max = report.singular_values.size() > 0 ? report.singular_values[0] : 0.0;
  report.tolerance_used = rel_tol * sigma_max;
  report.numerical_rank = (report.singular_values.array() > report.tolerance_used).count();
  return report;
}

struct WeightPair {
  Mat Q;
  Mat R;
};

// theta is col(vech Q, vech R) when q_first, col(vech R, vech Q) otherwise.
inline WeightPair split_weights(const Vec& theta, bool q_first, Index m, Index p) {
  WeightPair pair;
  if (q_first) {
    pair.Q = unvech(theta.head(vech_size(p)));
    pair.R = unvech(theta.tail(vech_size(m)));
  } else {
    pair.R = unvech(theta.head(vech_size(m)));
    pair.Q = unvech(theta.tail(vech_size(p)));
  }
  return pair;
}

inline double min_eigenvalue(const Mat& S) {
  return Eigen::SelfAdjointEigenSolver<Mat>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Mat& S) {
  return Eigen::SelfAdjointEigenSolver<Mat>(S, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

inline Mat clip_to_psd(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(S);
  Vec values = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

struct FinalizedRay {
  WeightEstimate estimate;
  // estimate.Q_hat equals scale * (Q split from the returned, sign-fixed theta).
  double scale = 1.0;
};

// Orients theta so that trace(Q) + trace(R) > 0, validates Q >= -1e-8 and
// R > 0 (falling back to the opposite sign before giving up), then rescales
// the ray so min eig diag(Q, R) = 1. alpha = max eig after rescaling, which
// on a one-dimensional feasible ray is the exact optimum of the
// condition-number program.
inline FinalizedRay finalize_noiseless(Vec& theta, bool q_first, Index m, Index p,
                                       SolverTag tag) {
  WeightPair pair = split_weights(theta, q_first, m, p);
  if (pair.Q.trace() + pair.R.trace() < 0.0) {
    theta = -theta;
    pair.Q = -pair.Q;
    pair.R = -pair.R;
  }
  auto admissible = [](const WeightPair& w) {
    return min_eigenvalue(w.Q) >= -1e-8 && min_eigenvalue(w.R) > 0.0;
  };
  if (!admissible(pair)) {
    theta = -theta;
    pair.Q = -pair.Q;
    pair.R = -pair.R;
    if (!admissible(pair)) {
      throw InconsistentDataError(
          "weight ray admits no sign with Q positive semidefinite and R positive definite");
    }
  }
  const double lambda_min = std::min(min_eigenvalue(pair.Q), min_eigenvalue(pair.R));
  if (lambda_min <= 1e-12) {
    throw InconsistentDataError(
        "diag(Q, R) is singular; the condition-number normalization needs a positive "
        "definite stack");
  }
  const double lambda_max = std::max(max_eigenvalue(pair.Q), max_eigenvalue(pair.R));

  FinalizedRay out;
  out.scale = 1.0 / lambda_min;
  out.estimate.Q_hat = pair.Q * out.scale;
  out.estimate.R_hat = pair.R * out.scale;
  out.estimate.alpha = lambda_max / lambda_min;
  out.estimate.tag = tag;
  return out;
}

// Noisy-case finish: trace-positive orientation only; the raw unit vector is
// kept (optionally eigenvalue-clipped to the PSD cone) and residual is the
// achieved minimum of the Rayleigh quotient.
inline FinalizedRay finalize_noisy(Vec& theta, bool q_first, Index m, Index p, SolverTag tag,
                                   double sigma_min, bool project_psd) {
  WeightPair pair = split_weights(theta, q_first, m, p);
  if (pair.Q.trace() + pair.R.trace() < 0.0) {
    theta = -theta;
    pair.Q = -pair.Q;
    pair.R = -pair.R;
  }
  FinalizedRay out;
  out.estimate.Q_hat = project_psd ? clip_to_psd(pair.Q) : pair.Q;
  out.estimate.R_hat = project_psd ? clip_to_psd(pair.R) : pair.R;
  out.estimate.residual = sigma_min;
  out.estimate.tag = tag;
  return out;
}

}  // namespace iocforge::detail
