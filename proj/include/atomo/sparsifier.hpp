#ifndef ATOMO_SPARSIFIER_HPP
#define ATOMO_SPARSIFIER_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include <atomo/atoms.hpp>
#include <atomo/rng.hpp>

namespace atomo {

/// Expected number of retained atoms; may be fractional ("sparsity on
/// average").
struct SparsityBudget {
  double s;
};

/// Per-atom inclusion probabilities aligned with a decomposition's
/// coefficients. p_i = 0 exactly on zero coefficients; the nonzero
/// support sums to the budget.
struct ProbabilityVector {
  Eigen::VectorXd p;
};

struct KeptAtom {
  AtomDescriptor atom;
  double scaled_weight;  // lambda_i / p_i
};

/// Unbiased sparse estimate of a gradient: the surviving atoms with
/// rescaled weights.
struct SparsifiedGradient {
  std::vector<KeptAtom> kept_atoms;
  std::vector<Eigen::Index> original_shape;
  DecompositionKind decomposition_kind = DecompositionKind::Entrywise;
  double budget_used = 0.0;

  Tensor materialize() const;
};

/// True iff s <= ||lambda||_1 / ||lambda||_inf; equality counts as
/// balanced.
bool is_s_balanced(const Eigen::VectorXd& lambda, SparsityBudget s);

/// Optimal inclusion probabilities: minimizes sum lambda_i^2 / p_i over
/// 0 < p_i <= 1 on the nonzero support, sum p_i = s. Sort-based scan of
/// |lambda| in descending order (stable, ties by original index).
ProbabilityVector atomo_probabilities_sorted(const Eigen::VectorXd& lambda,
                                             SparsityBudget s);

/// Same output as the sort variant, computed by repeated max-selection
/// of the unvisited coefficients (O(s n), no full sort).
ProbabilityVector atomo_probabilities_select(const Eigen::VectorXd& lambda,
                                             SparsityBudget s);

/// Keeps atom i independently with probability p_i, weight lambda_i/p_i.
SparsifiedGradient sample_sparsification(const AtomicDecomposition& d,
                                         const ProbabilityVector& p,
                                         RngStream& rng);

/// E||g_hat||^2 = sum_{p_i > 0} lambda_i^2 / p_i (orthonormal atoms).
double expected_second_moment(const Eigen::VectorXd& lambda,
                              const ProbabilityVector& p);

/// ||lambda||_1^2 / s, the floor any feasible p must respect.
double optimal_second_moment_lower_bound(const Eigen::VectorXd& lambda,
                                         SparsityBudget s);

}  // namespace atomo

#endif  // ATOMO_SPARSIFIER_HPP
