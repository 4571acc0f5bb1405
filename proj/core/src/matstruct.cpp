#include "iocforge/matstruct.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "iocforge/errors.hpp"

namespace iocforge {

namespace {

using LongMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

double default_rank_tolerance(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

void canonical_sign(Vec& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

void require_finite(const Mat& M, const char* what) {
  if (!M.allFinite()) {
    throw ContractViolation(std::string(what) + ": non-finite entries");
  }
}

Vec vech(const Mat& M, double sym_tol) {
  if (M.rows() != M.cols()) {
    throw ContractViolation("vech: matrix must be square");
  }
  require_finite(M, "vech");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol * scale) {
    throw ContractViolation("vech: matrix is not symmetric within tolerance");
  }
  const Index q = M.rows();
  Vec out(vech_size(q));
  Index k = 0;
  for (Index j = 0; j < q; ++j) {
    for (Index i = j; i < q; ++i) {
      out[k++] = M(i, j);
    }
  }
  return out;
}

Mat unvech(const Vec& v) {
  // Invert k = q(q+1)/2.
  const Index k = v.size();
  const Index q = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0));
  if (vech_size(q) != k) {
    throw ContractViolation("unvech: length is not a triangular number");
  }
  Mat M(q, q);
  Index idx = 0;
  for (Index j = 0; j < q; ++j) {
    for (Index i = j; i < q; ++i) {
      M(i, j) = v[idx];
      M(j, i) = v[idx];
      ++idx;
    }
  }
  return M;
}

Mat duplication_matrix(Index m) {
  if (m < 1) {
    throw ContractViolation("duplication_matrix: order must be positive");
  }
  Mat D = Mat::Zero(m * m, vech_size(m));
  Index col = 0;
  for (Index j = 0; j < m; ++j) {
    for (Index i = j; i < m; ++i) {
      D(j * m + i, col) = 1.0;  // vec position of (i, j)
      D(i * m + j, col) = 1.0;  // vec position of (j, i); same entry when i == j
      ++col;
    }
  }
  return D;
}

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

RankReport numerical_rank(const Mat& M, std::optional<double> tol) {
  RankReport report;
  if (M.size() == 0) {
    report.singular_values = Vec();
    report.tolerance_used = tol.value_or(0.0);
    return report;
  }
  Eigen::JacobiSVD<Mat> svd(M);
  report.singular_values = svd.singularValues();
  const double sigma_max = report.singular_values.size() > 0 ? report.singular_values[0] : 0.0;
  report.tolerance_used = tol.value_or(default_rank_tolerance(M.rows(), M.cols(), sigma_max));
  report.numerical_rank =
      (report.singular_values.array() > report.tolerance_used).count();
  return report;
}

SingularPair smallest_singular_pair(const Mat& M) {
  if (M.cols() < 1) {
    throw ContractViolation("smallest_singular_pair: need at least one column");
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  SingularPair pair;
  pair.vector = svd.matrixV().col(M.cols() - 1);
  pair.sigma_min = M.cols() <= M.rows() ? svd.singularValues()[M.cols() - 1] : 0.0;
  canonical_sign(pair.vector);
  return pair;
}

Mat pseudoinverse(const Mat& M, std::optional<double> tol) {
  if (M.size() == 0) return Mat(M.cols(), M.rows());
  Eigen::JacobiSVD<LongMat> svd(M.cast<long double>(),
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? static_cast<double>(sv[0]) : 0.0;
  const double cut = tol.value_or(default_rank_tolerance(M.rows(), M.cols(), sigma_max));
  Eigen::Matrix<long double, Eigen::Dynamic, 1> inv_sv(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    inv_sv[i] = static_cast<double>(sv[i]) > cut ? 1.0L / sv[i] : 0.0L;
  }
  LongMat pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return pinv.cast<double>();
}

std::vector<Vec> null_space_basis(const Mat& M, std::optional<double> tol) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv[0] : 0.0;
  const double cut = tol.value_or(default_rank_tolerance(M.rows(), M.cols(), sigma_max));
  const Index rank = (sv.array() > cut).count();
  std::vector<Vec> basis;
  basis.reserve(M.cols() - rank);
  for (Index j = rank; j < M.cols(); ++j) {
    Vec v = svd.matrixV().col(j);
    canonical_sign(v);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace iocforge
