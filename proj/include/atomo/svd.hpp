#ifndef ATOMO_SVD_HPP
#define ATOMO_SVD_HPP

#include <Eigen/Dense>
#include <vector>

namespace atomo {

/// Thin SVD with nonincreasing singular values. Left/right vectors are
/// unit columns; each u_i has its first nonzero entry nonnegative (the
/// sign is absorbed into v_i), which makes the factorization
/// deterministic for a fixed input.
struct SvdResult {
  std::vector<Eigen::VectorXd> u_vectors;
  std::vector<double> singular_values;
  std::vector<Eigen::VectorXd> v_vectors;
  int rank = 0;

  Eigen::MatrixXd reconstruct(Eigen::Index rows, Eigen::Index cols) const;
};

/// One-sided Jacobi SVD. Sweeps cyclic column pairs until every
/// off-diagonal Gram term falls below 1e-14 * ||X||_F^2. Singular values
/// below 1e-12 * sigma_1 are truncated.
SvdResult jacobi_svd(const Eigen::MatrixXd& x);

}  // namespace atomo

#endif  // ATOMO_SVD_HPP
