#include <atomo/sparsifier.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <atomo/errors.hpp>

namespace atomo {

Tensor SparsifiedGradient::materialize() const {
  Tensor out = Tensor::zeros(original_shape);
  if (decomposition_kind == DecompositionKind::Svd) {
    if (out.rank() != 2)
      throw ShapeError("materialize: SVD gradient needs rank-2 shape");
    const Eigen::Index cols = out.shape()[1];
    for (const auto& k : kept_atoms) {
      const auto& a = std::get<RankOneAtom>(k.atom);
      for (Eigen::Index r = 0; r < a.u.size(); ++r)
        for (Eigen::Index c = 0; c < a.v.size(); ++c)
          out.data()(r * cols + c) += k.scaled_weight * a.u(r) * a.v(c);
    }
  } else {
    for (const auto& k : kept_atoms) {
      const auto& a = std::get<StandardBasisAtom>(k.atom);
      out.data()(static_cast<Eigen::Index>(a.index)) += k.scaled_weight;
    }
  }
  return out;
}

bool is_s_balanced(const Eigen::VectorXd& lambda, SparsityBudget s) {
  const double linf = lambda.lpNorm<Eigen::Infinity>();
  if (linf == 0.0) throw DegenerateInputError("is_s_balanced: all-zero input");
  return s.s <= lambda.lpNorm<1>() / linf;
}

namespace {

struct SolveInput {
  std::vector<Eigen::Index> support;  // indices with lambda != 0
};

SolveInput check_budget(const Eigen::VectorXd& lambda, SparsityBudget s) {
  if (!(s.s > 0.0)) throw InvalidBudgetError("sparsity budget must be > 0");
  SolveInput in;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) != 0.0) in.support.push_back(i);
  if (in.support.empty())
    throw DegenerateInputError("probabilities: all-zero coefficient vector");
  if (s.s > static_cast<double>(in.support.size()))
    throw InfeasibleBudgetError(
        "budget " + std::to_string(s.s) + " exceeds nonzero count " +
        std::to_string(in.support.size()));
  return in;
}

}  // namespace

ProbabilityVector atomo_probabilities_sorted(const Eigen::VectorXd& lambda,
                                             SparsityBudget s) {
  SolveInput in = check_budget(lambda, s);
  auto& idx = in.support;
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(lambda(a)) > std::abs(lambda(b));
  });

  const std::size_t k = idx.size();
  std::vector<double> tail(k + 1, 0.0);  // tail[i] = sum_{j >= i} |lambda|
  for (std::size_t j = k; j-- > 0;)
    tail[j] = tail[j + 1] + std::abs(lambda(idx[j]));

  Eigen::VectorXd p = Eigen::VectorXd::Zero(lambda.size());
  double budget = s.s;
  for (std::size_t i = 0; i < k; ++i) {
    if (std::abs(lambda(idx[i])) * budget <= tail[i]) {
      for (std::size_t j = i; j < k; ++j)
        p(idx[j]) = std::abs(lambda(idx[j])) * budget / tail[i];
      return {std::move(p)};
    }
    p(idx[i]) = 1.0;
    budget -= 1.0;
  }
  return {std::move(p)};  // budget == nonzero count: all ones
}

ProbabilityVector atomo_probabilities_select(const Eigen::VectorXd& lambda,
                                             SparsityBudget s) {
  SolveInput in = check_budget(lambda, s);
  const auto& idx = in.support;
  const std::size_t k = idx.size();

  Eigen::VectorXd p = Eigen::VectorXd::Zero(lambda.size());
  std::vector<bool> visited(k, false);
  double budget = s.s;
  for (std::size_t step = 0; step < k; ++step) {
    // Max-selection over the unvisited support, ties by original index.
    // The tail mass is re-summed over the unvisited set each step (not
    // maintained by subtraction) so its relative accuracy stays at a few
    // ulps even when the tail is tiny next to the full l1 mass.
    std::size_t best = k;
    double remaining = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (visited[j]) continue;
      remaining += std::abs(lambda(idx[j]));
      if (best == k ||
          std::abs(lambda(idx[j])) > std::abs(lambda(idx[best])))
        best = j;
    }
    if (std::abs(lambda(idx[best])) * budget <= remaining) {
      for (std::size_t j = 0; j < k; ++j)
        if (!visited[j])
          p(idx[j]) = std::abs(lambda(idx[j])) * budget / remaining;
      return {std::move(p)};
    }
    p(idx[best]) = 1.0;
    visited[best] = true;
    budget -= 1.0;
  }
  return {std::move(p)};
}

SparsifiedGradient sample_sparsification(const AtomicDecomposition& d,
                                         const ProbabilityVector& p,
                                         RngStream& rng) {
  if (p.p.size() != d.coefficients.size())
    throw ShapeError("sample: probability/coefficient length mismatch");
  SparsifiedGradient out;
  out.original_shape = d.original_shape;
  out.decomposition_kind = d.kind;
  out.budget_used = p.p.sum();
  for (Eigen::Index i = 0; i < p.p.size(); ++i) {
    const double pi = p.p(i);
    if (pi <= 0.0) continue;
    if (rng.bernoulli(pi))
      out.kept_atoms.push_back(
          {d.atoms[static_cast<std::size_t>(i)], d.coefficients(i) / pi});
  }
  return out;
}

double expected_second_moment(const Eigen::VectorXd& lambda,
                              const ProbabilityVector& p) {
  if (p.p.size() != lambda.size())
    throw ShapeError("second moment: length mismatch");
  double f = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (p.p(i) > 0.0)
      f += lambda(i) * lambda(i) / p.p(i);
    else if (lambda(i) != 0.0)
      throw InfiniteVarianceError(
          "p_i = 0 on a nonzero coefficient (infinite variance)");
  }
  return f;
}

double optimal_second_moment_lower_bound(const Eigen::VectorXd& lambda,
                                         SparsityBudget s) {
  const double l1 = lambda.lpNorm<1>();
  if (l1 == 0.0) throw DegenerateInputError("lower bound: all-zero input");
  if (!(s.s > 0.0)) throw InvalidBudgetError("sparsity budget must be > 0");
  return l1 * l1 / s.s;
}

}  // namespace atomo
