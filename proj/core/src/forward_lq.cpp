#include "iocforge/forward_lq.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "iocforge/errors.hpp"
#include "precise.hpp"

namespace iocforge {

namespace {

void require_symmetric(const Mat& M, const char* what) {
  if (M.rows() != M.cols()) throw ContractViolation(std::string(what) + ": must be square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ContractViolation(std::string(what) + ": must be symmetric");
  }
}

}  // namespace

LqObjective::LqObjective(Mat Q_in, Mat R_in) : Q(std::move(Q_in)), R(std::move(R_in)) {
  require_finite(Q, "LqObjective.Q");
  require_finite(R, "LqObjective.R");
  require_symmetric(Q, "LqObjective.Q");
  require_symmetric(R, "LqObjective.R");
  Eigen::SelfAdjointEigenSolver<Mat> eig_q(Q);
  if (eig_q.eigenvalues().minCoeff() < -1e-10) {
    throw ContractViolation("LqObjective.Q: must be positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig_r(R);
  if (eig_r.eigenvalues().minCoeff() <= 0.0) {
    throw ContractViolation("LqObjective.R: must be positive definite");
  }
}

Mat block_diag_lift(const Mat& W, Index N) {
  Mat out = Mat::Zero(W.rows() * N, W.cols() * N);
  for (Index k = 0; k < N; ++k) {
    out.block(k * W.rows(), k * W.cols(), W.rows(), W.cols()) = W;
  }
  return out;
}

double lq_cost(const LqObjective& obj, const Vec& u_stacked, const Vec& y_stacked) {
  const Index N_u = u_stacked.size() / obj.m();
  const Index N_y = y_stacked.size() / obj.p();
  double cost = 0.0;
  for (Index k = 0; k < N_y; ++k) {
    const Vec yk = y_stacked.segment(k * obj.p(), obj.p());
    cost += yk.dot(obj.Q * yk);
  }
  for (Index k = 0; k < N_u; ++k) {
    const Vec uk = u_stacked.segment(k * obj.m(), obj.m());
    cost += uk.dot(obj.R * uk);
  }
  return cost;
}

Trajectory lq_oracle(const LtiSystem& sys, const LqObjective& obj, const Vec& x0,
                     Index horizon) {
  if (horizon < 1) throw ContractViolation("lq_oracle: horizon must be positive");
  if (obj.p() != sys.p() || obj.m() != sys.m()) {
    throw ContractViolation("lq_oracle: objective dimensions do not match the system");
  }
  if (x0.size() != sys.n()) throw ContractViolation("lq_oracle: x0 dimension mismatch");

  const Index n = sys.n(), m = sys.m(), p = sys.p();
  // Lifted maps y = Gamma x0 + Theta u with Theta the block Toeplitz of
  // Markov parameters (D on the diagonal).
  Mat Gamma(p * horizon, n);
  Mat Theta = Mat::Zero(p * horizon, m * horizon);
  Mat A_pow = Mat::Identity(n, n);
  for (Index k = 0; k < horizon; ++k) {
    Gamma.middleRows(k * p, p) = sys.C * A_pow;
    A_pow = sys.A * A_pow;
  }
  std::vector<Mat> markov(horizon);  // markov[0] = D, markov[d] = C A^{d-1} B
  markov[0] = sys.D;
  Mat A_d = Mat::Identity(n, n);
  for (Index d = 1; d < horizon; ++d) {
    markov[d] = sys.C * A_d * sys.B;
    A_d = sys.A * A_d;
  }
  for (Index k = 0; k < horizon; ++k) {
    for (Index j = 0; j <= k; ++j) {
      Theta.block(k * p, j * m, p, m) = markov[k - j];
    }
  }

  const Mat QQ = block_diag_lift(obj.Q, horizon);
  const Mat RR = block_diag_lift(obj.R, horizon);
  const Mat H = Theta.transpose() * QQ * Theta + RR;
  const Vec rhs = -(Theta.transpose() * (QQ * (Gamma * x0)));
  Eigen::LDLT<Mat> probe(H);
  if (probe.info() != Eigen::Success) {
    throw std::runtime_error("lq_oracle: lifted normal matrix is not positive definite");
  }
  const Vec u_opt = detail::solve_spd(H, rhs);
  const Mat inputs = Eigen::Map<const Mat>(u_opt.data(), m, horizon);
  return simulate(sys, x0, inputs);
}

ForwardSolution data_enabled_lq(const HankelBlocks& blocks, const Trajectory& w_ini,
                                const LqObjective& obj) {
  if (w_ini.length() != blocks.T_ini) {
    throw ContractViolation("data_enabled_lq: w_ini length must equal T_ini");
  }
  if (w_ini.m() != blocks.m() || w_ini.p() != blocks.p()) {
    throw ContractViolation("data_enabled_lq: channel counts do not match the data");
  }
  const Index M = blocks.num_cols();
  const Index d_past = (blocks.m() + blocks.p()) * blocks.T_ini;

  const Mat w_past = blocks.past_stack();
  Vec z_ini(d_past);
  z_ini << w_ini.stacked_inputs(), w_ini.stacked_outputs();

  // Membership check: the initial window has to lie in the image of the
  // past block, otherwise no g reproduces it.
  const Vec g_fit = detail::lstsq_min_norm(w_past, z_ini);
  const double fit_residual = (w_past * g_fit - z_ini).norm();
  if (fit_residual > 1e-6 * std::max(1.0, z_ini.norm())) {
    throw ResidualTooLargeError(
        "data_enabled_lq: initial trajectory is not representable by the offline data "
        "(residual " + std::to_string(fit_residual) + ")");
  }

  // Eliminate (u, y) = (U_f g, Y_f g): minimize g' P g subject to w_past g = z_ini,
  // solved through the KKT system with minimum-norm selection.
  const Mat QQ = block_diag_lift(obj.Q, blocks.N);
  const Mat RR = block_diag_lift(obj.R, blocks.N);
  const Mat P = 2.0 * (blocks.U_f.transpose() * RR * blocks.U_f +
                       blocks.Y_f.transpose() * QQ * blocks.Y_f);
  Mat kkt = Mat::Zero(M + d_past, M + d_past);
  kkt.topLeftCorner(M, M) = P;
  kkt.topRightCorner(M, d_past) = w_past.transpose();
  kkt.bottomLeftCorner(d_past, M) = w_past;
  Vec rhs = Vec::Zero(M + d_past);
  rhs.tail(d_past) = z_ini;
  const Vec sol = detail::lstsq_min_norm(kkt, rhs);

  ForwardSolution out;
  out.g = sol.head(M);
  out.u = blocks.U_f * out.g;
  out.y = blocks.Y_f * out.g;
  out.cost = lq_cost(obj, out.u, out.y);
  return out;
}

Vec condensed_lq(const Mat& K_p, const Mat& K_f, const Vec& z_ini, const LqObjective& obj) {
  if (K_p.rows() != K_f.rows()) throw ContractViolation("condensed_lq: predictor row mismatch");
  if (z_ini.size() != K_p.cols()) throw ContractViolation("condensed_lq: z_ini dimension mismatch");
  if (K_f.cols() % obj.m() != 0 || K_f.rows() % obj.p() != 0) {
    throw ContractViolation("condensed_lq: predictor incompatible with objective dimensions");
  }
  const Index N = K_f.cols() / obj.m();
  const Mat QQ = block_diag_lift(obj.Q, K_f.rows() / obj.p());
  const Mat RR = block_diag_lift(obj.R, N);
  const Mat H = K_f.transpose() * QQ * K_f + RR;
  Eigen::LLT<Mat> llt(H);
  if (llt.info() != Eigen::Success) {
    throw ContractViolation("condensed_lq: Hessian Kf'QKf + R is not positive definite");
  }
  const Vec rhs = -(K_f.transpose() * (QQ * (K_p * z_ini)));
  const Vec u = detail::solve_spd(H, rhs);
  const double grad_norm = (2.0 * (H * u) - 2.0 * rhs).norm();
  if (grad_norm > 1e-8 * (1.0 + z_ini.norm())) {
    throw std::runtime_error("condensed_lq: stationarity residual too large: " +
                             std::to_string(grad_norm));
  }
  return u;
}

}  // namespace iocforge
