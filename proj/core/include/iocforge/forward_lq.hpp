#pragma once

#include "iocforge/lti_data.hpp"
#include "iocforge/matstruct.hpp"

namespace iocforge {

// Quadratic output/input weights: Q symmetric positive semidefinite,
// R symmetric positive definite.
struct LqObjective {
  Mat Q;  // p x p
  Mat R;  // m x m

  LqObjective(Mat Q_in, Mat R_in);

  Index p() const { return Q.rows(); }
  Index m() const { return R.rows(); }
};

// Solution of a forward solve over the horizon: stacked inputs/outputs, the
// Hankel combination g (data-enabled case only, empty otherwise) and the
// achieved cost y'Qy + u'Ru with block-diagonal lifted weights.
struct ForwardSolution {
  Vec u;
  Vec y;
  Vec g;
  double cost = 0.0;
};

// I_N (x) W.
Mat block_diag_lift(const Mat& W, Index N);

double lq_cost(const LqObjective& obj, const Vec& u_stacked, const Vec& y_stacked);

// Model-based finite-horizon LQ oracle: minimizes sum_k y_k'Q y_k + u_k'R u_k
// from x0 over `horizon` steps via the dense lifted formulation, then
// simulates the optimal input. Ground truth for everything data-driven.
Trajectory lq_oracle(const LtiSystem& sys, const LqObjective& obj, const Vec& x0,
                     Index horizon);

// Data-enabled LQ: minimizes the lifted cost subject to
// col(U_p,Y_p,U_f,Y_f) g = col(u_ini, y_ini, u, y), returning the
// minimum-norm KKT solution in g. Throws ResidualTooLargeError when w_ini is
// not representable by the offline data.
ForwardSolution data_enabled_lq(const HankelBlocks& blocks, const Trajectory& w_ini,
                                const LqObjective& obj);

// Condensed unconstrained solve u = -(Kf'QKf + R)^{-1} Kf'Q Kp z_ini given a
// predictor split (K_p | K_f); z_ini = col(u_ini, y_ini) stacked.
Vec condensed_lq(const Mat& K_p, const Mat& K_f, const Vec& z_ini, const LqObjective& obj);

}  // namespace iocforge
