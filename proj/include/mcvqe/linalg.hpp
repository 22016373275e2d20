#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace mcvqe {

/// Solve a symmetric (possibly indefinite or singular) system through its
/// eigendecomposition, dropping eigenvalues with magnitude below `cutoff`.
inline Eigen::VectorXd symmetric_pinv_solve(const Eigen::MatrixXd& a,
                                            const Eigen::VectorXd& b,
                                            double cutoff = 1e-10) {
  if (a.rows() == 0) return Eigen::VectorXd(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::VectorXd evals = es.eigenvalues();
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * b;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(b.size());
  for (int i = 0; i < evals.size(); ++i) {
    if (std::abs(evals(i)) > cutoff) scaled(i) = proj(i) / evals(i);
  }
  return es.eigenvectors() * scaled;
}

inline double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace mcvqe
