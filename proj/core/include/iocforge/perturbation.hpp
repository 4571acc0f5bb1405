#pragma once

#include <optional>

#include "iocforge/ioc_simplified.hpp"
#include "iocforge/matstruct.hpp"

namespace iocforge {

// First-order sensitivity of the noisy simplified estimate to a perturbation
// of the measured optimal input.
struct PerturbationReport {
  double bound = 0.0;                    // norm of the first-order eigenvector correction
  std::optional<double> actual_deviation;  // sign-aligned ||theta' - theta|| from re-solving
  double sigma_gap = 0.0;                // smallest eigenvalue gap of Phi~'Phi~
  Vec eigvals;                           // eigenvalues of Phi~'Phi~, ascending
};

// The exact increment of phi_tilde caused by replacing u~ with u~ + delta_u
// while keeping z_ini fixed: assemble_phi_tilde(u~ + delta_u) =
// assemble_phi_tilde(u~) + delta_phi_tilde(delta_u).
Mat delta_phi_tilde(const CondensedPredictor& cp, const Vec& delta_u);

// First-order eigenvector correction of the smallest eigenpair of
// Phi~'Phi~ under Phi~ -> Phi~ + dphi:
//   v' - v = sum_i [v_i'(dphi'Phi~ + Phi~'dphi) v] / (sigma - sigma_i) v_i
// over the retained eigenpairs. `bound` is its norm. Throws
// GapTooSmallError when the smallest eigenvalue is not simple (gap below
// 1e-10 relative to the largest eigenvalue). With compute_actual, also
// re-solves with the perturbed matrix and reports the sign-aligned
// deviation between the two unit estimates.
PerturbationReport perturbation_bound(const SimplifiedSystemMatrix& sm, const Mat& dphi,
                                      bool compute_actual = true);

}  // namespace iocforge
