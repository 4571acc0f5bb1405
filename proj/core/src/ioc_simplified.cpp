#include "iocforge/ioc_simplified.hpp"

#include <string>

#include "iocforge/errors.hpp"
#include "solver_common.hpp"

namespace iocforge {

CondensedPredictor compute_condensed_predictor(const HankelBlocks& blocks) {
  const Index m = blocks.m(), p = blocks.p();
  Mat stack(blocks.U_p.rows() + blocks.Y_p.rows() + blocks.U_f.rows(), blocks.num_cols());
  stack << blocks.U_p, blocks.Y_p, blocks.U_f;
  const Mat K = blocks.Y_f * pseudoinverse(stack);

  CondensedPredictor cp;
  cp.m = m;
  cp.p = p;
  cp.T_ini = blocks.T_ini;
  cp.N = blocks.N;
  cp.K_p = K.leftCols((m + p) * blocks.T_ini);
  cp.K_f = K.rightCols(m * blocks.N);
  return cp;
}

Vec predict_output(const CondensedPredictor& cp, const Vec& z_ini, const Vec& u) {
  if (z_ini.size() != cp.K_p.cols() || u.size() != cp.K_f.cols()) {
    throw ContractViolation("predict_output: dimension mismatch");
  }
  return cp.K_f * u + cp.K_p * z_ini;
}

SimplifiedSystemMatrix assemble_phi_tilde(const CondensedPredictor& cp, const Vec& z_ini,
                                          const Vec& u_tilde) {
  const Index m = cp.m, p = cp.p, N = cp.N;
  if (u_tilde.size() != m * N) {
    throw ContractViolation("assemble_phi_tilde: u_tilde dimension mismatch");
  }
  require_finite(u_tilde, "assemble_phi_tilde.u_tilde");
  require_finite(z_ini, "assemble_phi_tilde.z_ini");

  SimplifiedSystemMatrix sm;
  sm.m = m;
  sm.p = p;
  sm.T_ini = cp.T_ini;
  sm.N = N;
  sm.y_es = predict_output(cp, z_ini, u_tilde);

  // Phi_y = sum_i (y_es_i)' (x) K_f(i-th block rows)'; the input part needs
  // no Kronecker sum: row block i of Phi_u is u~_i' (x) I_m.
  Mat phi_y = Mat::Zero(m * N, p * p);
  for (Index i = 0; i < N; ++i) {
    phi_y += kron(sm.y_es.segment(i * p, p).transpose(),
                  cp.K_f.middleRows(i * p, p).transpose());
  }
  Mat phi_u = Mat::Zero(m * N, m * m);
  for (Index i = 0; i < N; ++i) {
    phi_u.middleRows(i * m, m) =
        kron(u_tilde.segment(i * m, m).transpose(), Mat::Identity(m, m));
  }

  sm.phi_tilde.resize(m * N, vech_size(p) + vech_size(m));
  sm.phi_tilde << phi_y * duplication_matrix(p), phi_u * duplication_matrix(m);
  return sm;
}

IdentifiabilityReport check_identifiability_simplified(const SimplifiedSystemMatrix& sm,
                                                       double rel_tol) {
  IdentifiabilityReport report;
  report.column_count = sm.phi_tilde.cols();
  report.rank = detail::rank_at_relative_tol(sm.phi_tilde, rel_tol);
  report.required_rank = report.column_count - 1;
  report.identifiable = report.rank.numerical_rank == report.required_rank;
  return report;
}

bool check_horizon(Index m, Index p, Index N) {
  if (m < 1 || p < 1 || N < 1) throw ContractViolation("check_horizon: dimensions must be positive");
  // N < (m^2+m+p^2+p)/(2m) - 1/m, kept in integers: 2 m N < m^2+m+p^2+p - 2.
  return 2 * m * N >= m * m + m + p * p + p - 2;
}

WeightEstimate solve_noiseless_simplified(const SimplifiedSystemMatrix& sm, double rel_tol) {
  const RankReport rank = detail::rank_at_relative_tol(sm.phi_tilde, rel_tol);
  const Index null_dim = sm.weight_dims() - rank.numerical_rank;
  if (null_dim != 1) {
    throw UnidentifiableError(
        "solve_noiseless_simplified: weight null space has dimension " +
        std::to_string(null_dim) + " (need 1); rank " +
        std::to_string(rank.numerical_rank) + " of " + std::to_string(sm.weight_dims()));
  }
  Vec theta = null_space_basis(sm.phi_tilde, rank.tolerance_used).front();
  auto ray = detail::finalize_noiseless(theta, /*q_first=*/true, sm.m, sm.p,
                                        SolverTag::kNoiselessSimplified);
  ray.estimate.residual = (sm.phi_tilde * theta).norm();
  return ray.estimate;
}

WeightEstimate solve_noisy_simplified(const SimplifiedSystemMatrix& sm, bool project_psd) {
  const SingularPair pair = smallest_singular_pair(sm.phi_tilde);
  Vec theta = pair.vector;
  auto ray = detail::finalize_noisy(theta, /*q_first=*/true, sm.m, sm.p,
                                    SolverTag::kNoisySimplified, pair.sigma_min, project_psd);
  return ray.estimate;
}

}  // namespace iocforge
