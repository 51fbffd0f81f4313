#ifndef ATOMO_QUANTIZER_HPP
#define ATOMO_QUANTIZER_HPP

#include <Eigen/Dense>

#include <atomo/sparsifier.hpp>

namespace atomo {

/// Exponent of the l_q norm, with q = infinity as an explicit case.
/// q < 1 is admitted; note ||.||_q is only a quasi-norm there.
struct QNorm {
  double q = 2.0;
  bool is_inf = false;

  static QNorm infinity() { return {0.0, true}; }
};

double lq_norm(const Eigen::VectorXd& g, QNorm q);

/// s = ||g||_1 / ||g||_q; always within the balanced regime.
SparsityBudget lq_sparsity_budget(const Eigen::VectorXd& g, QNorm q);

/// Entry-wise sparsification with p_i = |g_i| / ||g||_q; kept
/// coordinates carry sign(g_i) * ||g||_q.
SparsifiedGradient lq_quantize(const Eigen::VectorXd& g, QNorm q,
                               RngStream& rng);

/// lq_quantize with q = 2.
SparsifiedGradient qsgd_1bit(const Eigen::VectorXd& g, RngStream& rng);

/// lq_quantize with q = infinity.
SparsifiedGradient terngrad(const Eigen::VectorXd& g, RngStream& rng);

}  // namespace atomo

#endif  // ATOMO_QUANTIZER_HPP
