#pragma once

#include "iocforge/estimate.hpp"
#include "iocforge/lti_data.hpp"
#include "iocforge/matstruct.hpp"

namespace iocforge {

// Least-squares output predictor K = Y_f * pinv(col(U_p, Y_p, U_f)) split
// into the initial-window part K_p and the future-input part K_f.
struct CondensedPredictor {
  Mat K_p;  // (p N) x (m+p) T_ini
  Mat K_f;  // (p N) x (m N)
  Index m = 0, p = 0, T_ini = 0, N = 0;
};

// The stationarity system of the condensed problem, linear in
// col(vech Q, vech R). Rows: m N; columns: (m^2+m+p^2+p)/2. Also carries the
// predicted future output y_es = K_f u~ + K_p z_ini used in the assembly.
struct SimplifiedSystemMatrix {
  Mat phi_tilde;
  Vec y_es;
  Index m = 0, p = 0, T_ini = 0, N = 0;

  Index weight_dims() const { return vech_size(m) + vech_size(p); }
};

CondensedPredictor compute_condensed_predictor(const HankelBlocks& blocks);

// y_es = K_f u + K_p z_ini with z_ini = col(u_ini, y_ini) stacked.
Vec predict_output(const CondensedPredictor& cp, const Vec& z_ini, const Vec& u);

// Assembles phi_tilde so that phi_tilde * col(vech Q, vech R) equals
// (Kf' Q_lift Kf + R_lift) u~ + Kf' Q_lift Kp z_ini for all symmetric Q, R.
SimplifiedSystemMatrix assemble_phi_tilde(const CondensedPredictor& cp, const Vec& z_ini,
                                          const Vec& u_tilde);

// Identifiable when rank(phi_tilde) is exactly one less than its column
// count.
IdentifiabilityReport check_identifiability_simplified(
    const SimplifiedSystemMatrix& sm, double rel_tol = kIdentifiabilityRankTol);

// Necessary horizon condition: with fewer than (m^2+m+p^2+p-2)/(2m) future
// steps the stationarity system has too few rows and the weights cannot be
// identified. Returns false when the horizon is too short.
bool check_horizon(Index m, Index p, Index N);

// Null-space solver for the noiseless case; same normalization contract as
// the vanilla solver (min eig diag(Q_hat, R_hat) = 1, alpha = condition
// number), no costate.
WeightEstimate solve_noiseless_simplified(const SimplifiedSystemMatrix& sm,
                                          double rel_tol = kIdentifiabilityRankTol);

// Rayleigh-quotient estimator: unit vector of the smallest singular value of
// phi_tilde; residual = sigma_min.
WeightEstimate solve_noisy_simplified(const SimplifiedSystemMatrix& sm,
                                      bool project_psd = false);

}  // namespace iocforge
