#pragma once

#include <optional>

#include "iocforge/estimate.hpp"
#include "iocforge/lti_data.hpp"
#include "iocforge/matstruct.hpp"

namespace iocforge {

// The stacked stationarity system of the data-enabled LQ problem, linear in
// (lambda_ini, vech R, vech Q) in that order. Row count is the Hankel column
// count M; column count is (m+p)T_ini + (m^2+m+p^2+p)/2.
struct VanillaSystemMatrix {
  Mat psi_tilde;
  Index m = 0, p = 0, T_ini = 0, N = 0;

  Index num_rows() const { return psi_tilde.rows(); }
  Index costate_dims() const { return (m + p) * T_ini; }
  Index weight_dims() const { return vech_size(m) + vech_size(p); }
  // Columns multiplying the costate: the transpose of col(U_p, Y_p).
  Mat past_block() const { return psi_tilde.leftCols(costate_dims()); }
  // Columns multiplying col(vech R, vech Q).
  Mat weight_block() const { return psi_tilde.rightCols(weight_dims()); }
};

// Left-hand side of the stationarity identity evaluated directly:
// w_p' lambda_ini + 2 U_f'(R_lift u~) + 2 Y_f'(Q_lift y~). The oracle for
// the assembled matrix.
Vec kkt_residual_vanilla(const HankelBlocks& blocks, const Vec& u_tilde, const Vec& y_tilde,
                         const Mat& Q, const Mat& R, const Vec& lambda_ini);

// Assembles psi_tilde so that psi_tilde * col(lambda_ini, vech R, vech Q)
// reproduces kkt_residual_vanilla for every argument.
VanillaSystemMatrix assemble_psi_tilde(const HankelBlocks& blocks, const Vec& u_tilde,
                                       const Vec& y_tilde);

// The raw pre-duplication stationarity matrix
// (1', u~', y~') (x) (w_p', 2U_f', 2Y_f'); diagnostic only. Its rank equals
// the rank of the offline data matrix.
Mat assemble_psi_raw(const HankelBlocks& blocks, const Vec& u_tilde, const Vec& y_tilde);

// The weight columns with the costate columns projected out:
// (I - W W^+) * weight_block, where W = past_block. The weights are pinned
// to a single ray exactly when this matrix has a one-dimensional null space.
Mat reduced_weight_matrix(const VanillaSystemMatrix& sm);

// Identifiability: rank(psi_tilde) must equal rank(past block) + weight
// unknowns - 1. When the past block has full row rank this is the nominal
// condition rank = (m+p)T_ini + (m^2+m+p^2+p)/2 - 1; rank-deficient past
// blocks (pT_ini > n on exact data) contribute costate directions that can
// never constrain the weights, and the required rank drops accordingly.
IdentifiabilityReport check_identifiability_vanilla(
    const VanillaSystemMatrix& sm, double rel_tol = kIdentifiabilityRankTol);

// Exact null-space solver for the noiseless case. Requires the reduced
// weight matrix to have a one-dimensional null space; scales the estimate so
// that min eig diag(Q_hat, R_hat) = 1 and reports the achieved condition
// number as alpha (the exact optimum of the condition-number program, since
// the feasible set is a single ray).
WeightEstimate solve_noiseless_vanilla(const VanillaSystemMatrix& sm,
                                       double rel_tol = kIdentifiabilityRankTol);

// Rayleigh-quotient estimator for noisy data: the unit vector minimizing the
// stationarity residual after the costate has been eliminated by least
// squares. residual = sigma_min of the reduced weight matrix. No PSD
// projection unless requested.
WeightEstimate solve_noisy_vanilla(const VanillaSystemMatrix& sm, bool project_psd = false);

// Least-squares costate fit for given weights: argmin_l ||w_p' l + c(Q, R)||.
// Validation scaffolding; the solvers recover the costate internally.
Vec fit_lambda_ini(const HankelBlocks& blocks, const Vec& u_tilde, const Vec& y_tilde,
                   const Mat& Q, const Mat& R);

}  // namespace iocforge
