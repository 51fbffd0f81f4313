#ifndef ATOMO_SPECTRAL_HPP
#define ATOMO_SPECTRAL_HPP

#include <string>

#include <atomo/sparsifier.hpp>

namespace atomo {

struct MatrixNorms {
  double l11 = 0.0;       // sum of absolute entries
  double lmax = 0.0;      // max absolute entry
  double nuclear = 0.0;   // sum of singular values
  double spectral = 0.0;  // largest singular value
  double frobenius = 0.0;
};

/// Entry-wise vs SVD sparsification of the same matrix at equal
/// communication cost (s' = s / (n + m)). Second moments are the closed
/// forms when the regime is balanced, the solver's actual optimum
/// otherwise; the flags say which regime each value came from.
struct SparsificationComparison {
  double budget_entrywise = 0.0;       // s
  double budget_svd = 0.0;             // s' = s / (n + m)
  double comm_cost_entrywise = 0.0;    // s reals
  double comm_cost_svd = 0.0;          // s' * (n + m) reals
  double second_moment_entrywise = 0.0;
  double second_moment_svd = 0.0;
  bool svd_wins = false;
  bool entrywise_balanced = false;
  bool svd_balanced = false;

  std::string to_json() const;
};

MatrixNorms matrix_norms(const Tensor& x);

/// ATOMO on the singular values: kept atoms are scaled singular
/// triplets. Requires 0 < s' <= rank(X).
SparsifiedGradient spectral_atomo(const Tensor& x, SparsityBudget s_prime,
                                  RngStream& rng);

SparsificationComparison compare_costs(const Tensor& x, SparsityBudget s);

}  // namespace atomo

#endif  // ATOMO_SPECTRAL_HPP
