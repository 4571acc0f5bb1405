#pragma once

// Extended-precision internal kernels. The Hankel stacks that drive the
// solvers are ill-conditioned (condition numbers up to ~1e8 on perfectly
// valid data), so double-precision factorizations lose several digits that
// the recovered weights cannot spare. Inputs and outputs stay double; only
// the factorization runs in long double.

#include <Eigen/Dense>

#include "iocforge/matstruct.hpp"

namespace iocforge::detail {

using LongMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Solves H x = rhs for symmetric positive definite H.
inline Vec solve_spd(const Mat& H, const Vec& rhs) {
  Eigen::LDLT<LongMat> ldlt(H.cast<long double>());
  LongVec x = ldlt.solve(rhs.cast<long double>());
  return x.cast<double>();
}

// Minimum-norm least-squares solution pinv(A) * b.
inline Vec lstsq_min_norm(const Mat& A, const Vec& b, double rel_tol = 0.0) {
  Eigen::JacobiSVD<LongMat> svd(A.cast<long double>(),
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const long double sigma_max = sv.size() > 0 ? sv[0] : 0.0L;
  long double cut = static_cast<long double>(std::max(A.rows(), A.cols())) *
                    std::numeric_limits<double>::epsilon() * sigma_max;
  if (rel_tol > 0.0) cut = rel_tol * sigma_max;
  LongVec c = svd.matrixU().transpose() * b.cast<long double>();
  for (Index i = 0; i < sv.size(); ++i) {
    c[i] = sv[i] > cut ? c[i] / sv[i] : 0.0L;
  }
  LongVec x = svd.matrixV() * c;
  return x.cast<double>();
}

// Projects the columns of S onto the orthogonal complement of span(W):
// returns S - W * pinv(W) * S.
inline Mat project_out_colspace(const Mat& W, const Mat& S) {
  Eigen::JacobiSVD<LongMat> svd(W.cast<long double>(),
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const long double sigma_max = sv.size() > 0 ? sv[0] : 0.0L;
  const long double cut = static_cast<long double>(std::max(W.rows(), W.cols())) *
                          std::numeric_limits<double>::epsilon() * sigma_max;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cut) ++rank;
  }
  const LongMat U = svd.matrixU().leftCols(rank);
  LongMat S_ld = S.cast<long double>();
  LongMat projected = S_ld - U * (U.transpose() * S_ld);
  return projected.cast<double>();
}

}  // namespace iocforge::detail
