#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace iocforge {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Result of a numerical rank decision. `numerical_rank` counts the singular
// values strictly above `tolerance_used`; `singular_values` is descending.
struct RankReport {
  Index numerical_rank = 0;
  Vec singular_values;
  double tolerance_used = 0.0;
};

struct SingularPair {
  Vec vector;        // unit right singular vector of the smallest singular value
  double sigma_min;  // equals ||M * vector||
};

// Throws ContractViolation if any entry is NaN or infinite.
void require_finite(const Mat& M, const char* what);

// Number of independent entries of a symmetric q x q matrix.
constexpr Index vech_size(Index q) { return q * (q + 1) / 2; }

// Half-vectorization: stacks the lower triangle (i >= j) column by column.
// The input must be square and symmetric to `sym_tol` (relative to the
// largest entry magnitude).
Vec vech(const Mat& M, double sym_tol = 1e-10);

// Inverse of vech: rebuilds the symmetric matrix.
Mat unvech(const Vec& v);

// Duplication matrix D_m of size m^2 x m(m+1)/2 with D_m * vech(S) = vec(S)
// for every symmetric S. Column (i,j), i >= j in vech order, is vec of the
// matrix with ones at (i,j) and (j,i).
Mat duplication_matrix(Index m);

// Kronecker product, (p*r) x (q*s) for A p x q and B r x s.
Mat kron(const Mat& A, const Mat& B);

// Default tolerance is max(rows, cols) * eps * sigma_max; pass `tol` to
// override with an absolute threshold.
RankReport numerical_rank(const Mat& M, std::optional<double> tol = std::nullopt);

// Right singular vector of the smallest singular value. Sign convention:
// the first entry with magnitude above 1e-12 is made positive, so repeated
// calls are deterministic. For a wide matrix the returned sigma is 0 and the
// vector spans the structural null space.
SingularPair smallest_singular_pair(const Mat& M);

// Moore-Penrose pseudoinverse via SVD; singular values at or below the
// tolerance are zeroed. The SVD and the reconstruction run in extended
// precision internally: downstream solvers apply pseudoinverses of
// ill-conditioned trajectory stacks where double-precision factorization
// error would dominate the recovered weights.
Mat pseudoinverse(const Mat& M, std::optional<double> tol = std::nullopt);

// Orthonormal basis of the numerical null space (right singular vectors
// whose singular value is <= tolerance, plus the structural directions of a
// wide matrix). Empty when M has full column rank. Each vector uses the
// smallest_singular_pair sign convention.
std::vector<Vec> null_space_basis(const Mat& M, std::optional<double> tol = std::nullopt);

}  // namespace iocforge
