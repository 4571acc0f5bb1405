#include "iocforge/perturbation.hpp"

#include <string>

#include "iocforge/errors.hpp"

namespace iocforge {

Mat delta_phi_tilde(const CondensedPredictor& cp, const Vec& delta_u) {
  const Index m = cp.m, p = cp.p, N = cp.N;
  if (delta_u.size() != m * N) {
    throw ContractViolation("delta_phi_tilde: delta_u dimension mismatch");
  }
  const Vec dy = cp.K_f * delta_u;  // increment of the predicted output
  Mat dphi_y = Mat::Zero(m * N, p * p);
  for (Index i = 0; i < N; ++i) {
    dphi_y += kron(dy.segment(i * p, p).transpose(), cp.K_f.middleRows(i * p, p).transpose());
  }
  Mat dphi_u = Mat::Zero(m * N, m * m);
  for (Index i = 0; i < N; ++i) {
    dphi_u.middleRows(i * m, m) =
        kron(delta_u.segment(i * m, m).transpose(), Mat::Identity(m, m));
  }
  Mat dphi(m * N, vech_size(p) + vech_size(m));
  dphi << dphi_y * duplication_matrix(p), dphi_u * duplication_matrix(m);
  return dphi;
}

PerturbationReport perturbation_bound(const SimplifiedSystemMatrix& sm, const Mat& dphi,
                                      bool compute_actual) {
  if (dphi.rows() != sm.phi_tilde.rows() || dphi.cols() != sm.phi_tilde.cols()) {
    throw ContractViolation("perturbation_bound: dphi shape mismatch");
  }
  const Mat gram = sm.phi_tilde.transpose() * sm.phi_tilde;
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);  // ascending eigenvalues
  const Vec values = eig.eigenvalues();
  const Mat vectors = eig.eigenvectors();
  const Index count = values.size();

  PerturbationReport report;
  report.eigvals = values;
  report.sigma_gap = values[1] - values[0];
  const double gap_floor = 1e-10 * values[count - 1];
  if (report.sigma_gap <= gap_floor) {
    throw GapTooSmallError("perturbation_bound: smallest eigenvalue is not simple (gap " +
                           std::to_string(report.sigma_gap) + ")");
  }

  const Mat delta_gram = dphi.transpose() * sm.phi_tilde + sm.phi_tilde.transpose() * dphi;
  const Vec v = vectors.col(0);
  Vec correction = Vec::Zero(count);
  for (Index i = 1; i < count; ++i) {
    const double coeff = vectors.col(i).dot(delta_gram * v) / (values[0] - values[i]);
    correction += coeff * vectors.col(i);
  }
  report.bound = correction.norm();

  if (compute_actual) {
    const Mat perturbed = sm.phi_tilde + dphi;
    Eigen::SelfAdjointEigenSolver<Mat> eig_p(perturbed.transpose() * perturbed);
    const Vec v_p = eig_p.eigenvectors().col(0);
    report.actual_deviation = std::min((v_p - v).norm(), (v_p + v).norm());
  }
  return report;
}

}  // namespace iocforge
