#include <atomo/svd.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <atomo/errors.hpp>

namespace atomo {

Eigen::MatrixXd SvdResult::reconstruct(Eigen::Index rows,
                                       Eigen::Index cols) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rank; ++i)
    m.noalias() += singular_values[i] * u_vectors[i] * v_vectors[i].transpose();
  return m;
}

namespace {

constexpr double kConvergenceFactor = 1e-14;  // on ||X||_F^2
constexpr double kTruncationFactor = 1e-12;   // on sigma_1
constexpr int kMaxSweeps = 100;

// One-sided Jacobi on the columns of a (rows >= cols). On return the
// columns of a are sigma_j * u_j and v holds the accumulated rotations.
void orthogonalize_columns(Eigen::MatrixXd& a, Eigen::MatrixXd& v) {
  const Eigen::Index m = a.cols();
  const double threshold = kConvergenceFactor * a.squaredNorm();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool converged = true;
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double gamma = a.col(p).dot(a.col(q));
        if (std::abs(gamma) <= threshold) continue;
        converged = false;
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) /
            (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        Eigen::VectorXd ap = a.col(p);
        a.col(p) = c * ap - s * a.col(q);
        a.col(q) = s * ap + c * a.col(q);
        Eigen::VectorXd vp = v.col(p);
        v.col(p) = c * vp - s * v.col(q);
        v.col(q) = s * vp + c * v.col(q);
      }
    }
    if (converged) break;
  }
}

}  // namespace

SvdResult jacobi_svd(const Eigen::MatrixXd& x) {
  if (x.rows() < 1 || x.cols() < 1)
    throw ShapeError("svd: matrix must be nonempty");

  const bool transposed = x.rows() < x.cols();
  Eigen::MatrixXd a =
      transposed ? Eigen::MatrixXd(x.transpose()) : x;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(a.cols(), a.cols());
  orthogonalize_columns(a, v);

  const Eigen::Index m = a.cols();
  std::vector<double> sigma(m);
  for (Eigen::Index j = 0; j < m; ++j) sigma[j] = a.col(j).norm();

  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) {
                     return sigma[i] > sigma[j];
                   });

  SvdResult out;
  const double cutoff =
      sigma.empty() ? 0.0 : kTruncationFactor * sigma[order[0]];
  for (Eigen::Index j : order) {
    if (sigma[j] <= cutoff || sigma[j] == 0.0) continue;
    Eigen::VectorXd left = a.col(j) / sigma[j];
    Eigen::VectorXd right = v.col(j);
    if (transposed) std::swap(left, right);
    // Sign convention: first nonzero entry of u nonnegative.
    for (Eigen::Index i = 0; i < left.size(); ++i) {
      if (left(i) != 0.0) {
        if (left(i) < 0.0) {
          left = -left;
          right = -right;
        }
        break;
      }
    }
    out.u_vectors.push_back(std::move(left));
    out.singular_values.push_back(sigma[j]);
    out.v_vectors.push_back(std::move(right));
  }
  out.rank = static_cast<int>(out.singular_values.size());
  return out;
}

}  // namespace atomo
