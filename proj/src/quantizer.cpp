#include <atomo/quantizer.hpp>

#include <cmath>

#include <atomo/errors.hpp>

namespace atomo {

double lq_norm(const Eigen::VectorXd& g, QNorm q) {
  if (q.is_inf) return g.lpNorm<Eigen::Infinity>();
  if (!(q.q > 0.0)) throw InvalidBudgetError("q must be in (0, inf]");
  if (q.q == 1.0) return g.lpNorm<1>();
  if (q.q == 2.0) return g.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    acc += std::pow(std::abs(g(i)), q.q);
  return std::pow(acc, 1.0 / q.q);
}

SparsityBudget lq_sparsity_budget(const Eigen::VectorXd& g, QNorm q) {
  const double nq = lq_norm(g, q);
  if (nq == 0.0)
    throw DegenerateInputError("lq budget: zero vector");
  return {g.lpNorm<1>() / nq};
}

SparsifiedGradient lq_quantize(const Eigen::VectorXd& g, QNorm q,
                               RngStream& rng) {
  const double nq = lq_norm(g, q);
  if (nq == 0.0) throw DegenerateInputError("lq quantize: zero vector");
  AtomicDecomposition d =
      decompose_entrywise(Tensor({g.size()}, g));
  ProbabilityVector p{g.cwiseAbs() / nq};
  return sample_sparsification(d, p, rng);
}

SparsifiedGradient qsgd_1bit(const Eigen::VectorXd& g, RngStream& rng) {
  return lq_quantize(g, QNorm{2.0, false}, rng);
}

SparsifiedGradient terngrad(const Eigen::VectorXd& g, RngStream& rng) {
  return lq_quantize(g, QNorm::infinity(), rng);
}

}  // namespace atomo
