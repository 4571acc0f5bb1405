#include "iocforge/ioc_vanilla.hpp"

#include <cmath>
#include <string>

#include "iocforge/errors.hpp"
#include "precise.hpp"
#include "solver_common.hpp"

namespace iocforge {

Vec kkt_residual_vanilla(const HankelBlocks& blocks, const Vec& u_tilde, const Vec& y_tilde,
                         const Mat& Q, const Mat& R, const Vec& lambda_ini) {
  const Index m = blocks.m(), p = blocks.p(), N = blocks.N;
  if (u_tilde.size() != m * N || y_tilde.size() != p * N) {
    throw ContractViolation("kkt_residual_vanilla: trajectory tail dimension mismatch");
  }
  if (lambda_ini.size() != (m + p) * blocks.T_ini) {
    throw ContractViolation("kkt_residual_vanilla: costate dimension mismatch");
  }
  Vec ru(m * N), qy(p * N);
  for (Index i = 0; i < N; ++i) {
    ru.segment(i * m, m) = R * u_tilde.segment(i * m, m);
    qy.segment(i * p, p) = Q * y_tilde.segment(i * p, p);
  }
  return blocks.past_stack().transpose() * lambda_ini +
         2.0 * (blocks.U_f.transpose() * ru) + 2.0 * (blocks.Y_f.transpose() * qy);
}

VanillaSystemMatrix assemble_psi_tilde(const HankelBlocks& blocks, const Vec& u_tilde,
                                       const Vec& y_tilde) {
  const Index m = blocks.m(), p = blocks.p(), N = blocks.N, M = blocks.num_cols();
  if (u_tilde.size() != m * N || y_tilde.size() != p * N) {
    throw ContractViolation("assemble_psi_tilde: trajectory tail dimension mismatch");
  }
  require_finite(u_tilde, "assemble_psi_tilde.u_tilde");
  require_finite(y_tilde, "assemble_psi_tilde.y_tilde");

  // U~_f = sum_i u~_i' (x) 2 U_f(i-th block rows)' and likewise for Y~_f.
  Mat U_ft = Mat::Zero(M, m * m);
  for (Index i = 0; i < N; ++i) {
    const Mat block = 2.0 * blocks.U_f.middleRows(i * m, m).transpose();
    U_ft += kron(u_tilde.segment(i * m, m).transpose(), block);
  }
  Mat Y_ft = Mat::Zero(M, p * p);
  for (Index i = 0; i < N; ++i) {
    const Mat block = 2.0 * blocks.Y_f.middleRows(i * p, p).transpose();
    Y_ft += kron(y_tilde.segment(i * p, p).transpose(), block);
  }

  VanillaSystemMatrix sm;
  sm.m = m;
  sm.p = p;
  sm.T_ini = blocks.T_ini;
  sm.N = N;
  sm.psi_tilde.resize(M, (m + p) * blocks.T_ini + vech_size(m) + vech_size(p));
  sm.psi_tilde << blocks.past_stack().transpose(), U_ft * duplication_matrix(m),
      Y_ft * duplication_matrix(p);
  return sm;
}

Mat assemble_psi_raw(const HankelBlocks& blocks, const Vec& u_tilde, const Vec& y_tilde) {
  const Index M = blocks.num_cols();
  Mat coeff(M, (blocks.m() + blocks.p()) * blocks.T_ini +
                   blocks.U_f.rows() + blocks.Y_f.rows());
  coeff << blocks.past_stack().transpose(), 2.0 * blocks.U_f.transpose(),
      2.0 * blocks.Y_f.transpose();
  Mat data_row(1, 1 + u_tilde.size() + y_tilde.size());
  data_row(0, 0) = 1.0;
  data_row.block(0, 1, 1, u_tilde.size()) = u_tilde.transpose();
  data_row.rightCols(y_tilde.size()) = y_tilde.transpose();
  return kron(data_row, coeff);
}

Mat reduced_weight_matrix(const VanillaSystemMatrix& sm) {
  return detail::project_out_colspace(sm.past_block(), sm.weight_block());
}

IdentifiabilityReport check_identifiability_vanilla(const VanillaSystemMatrix& sm,
                                                    double rel_tol) {
  IdentifiabilityReport report;
  report.column_count = sm.psi_tilde.cols();
  report.rank = detail::rank_at_relative_tol(sm.psi_tilde, rel_tol);
  const RankReport past = detail::rank_at_relative_tol(sm.past_block(), rel_tol);
  report.degenerate_costate_dims = sm.costate_dims() - past.numerical_rank;
  report.required_rank = past.numerical_rank + sm.weight_dims() - 1;
  report.identifiable = report.rank.numerical_rank == report.required_rank;
  return report;
}

WeightEstimate solve_noiseless_vanilla(const VanillaSystemMatrix& sm, double rel_tol) {
  const Mat reduced = reduced_weight_matrix(sm);
  const RankReport rank = detail::rank_at_relative_tol(reduced, rel_tol);
  const Index null_dim = sm.weight_dims() - rank.numerical_rank;
  if (null_dim != 1) {
    throw UnidentifiableError(
        "solve_noiseless_vanilla: weight null space has dimension " +
        std::to_string(null_dim) + " (need 1); rank " +
        std::to_string(rank.numerical_rank) + " of " + std::to_string(sm.weight_dims()));
  }
  const auto basis = null_space_basis(reduced, rank.tolerance_used);
  Vec theta = basis.front();

  auto ray = detail::finalize_noiseless(theta, /*q_first=*/false, sm.m, sm.p,
                                        SolverTag::kNoiselessVanilla);

  // Recover the matching costate and fold in the same sign/scale.
  const Vec lambda = detail::lstsq_min_norm(sm.past_block(), -(sm.weight_block() * theta));
  ray.estimate.lambda_ini = lambda * ray.scale;

  Vec full(sm.psi_tilde.cols());
  full << lambda, theta;
  ray.estimate.residual = (sm.psi_tilde * full).norm() / full.norm();
  return ray.estimate;
}

WeightEstimate solve_noisy_vanilla(const VanillaSystemMatrix& sm, bool project_psd) {
  const Mat reduced = reduced_weight_matrix(sm);
  const SingularPair pair = smallest_singular_pair(reduced);
  Vec theta = pair.vector;

  auto ray = detail::finalize_noisy(theta, /*q_first=*/false, sm.m, sm.p,
                                    SolverTag::kNoisyVanilla, pair.sigma_min, project_psd);
  const Vec lambda = detail::lstsq_min_norm(sm.past_block(), -(sm.weight_block() * theta));
  ray.estimate.lambda_ini = lambda * ray.scale;
  return ray.estimate;
}

Vec fit_lambda_ini(const HankelBlocks& blocks, const Vec& u_tilde, const Vec& y_tilde,
                   const Mat& Q, const Mat& R) {
  const Vec zero_costate = Vec::Zero((blocks.m() + blocks.p()) * blocks.T_ini);
  const Vec forcing = kkt_residual_vanilla(blocks, u_tilde, y_tilde, Q, R, zero_costate);
  return detail::lstsq_min_norm(blocks.past_stack().transpose(), -forcing);
}

}  // namespace iocforge
