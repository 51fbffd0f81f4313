#include <atomo/spectral.hpp>

#include <nlohmann/json.hpp>

#include <atomo/errors.hpp>

namespace atomo {

MatrixNorms matrix_norms(const Tensor& x) {
  if (!x.is_matrix()) throw ShapeError("matrix_norms: input must be rank-2");
  MatrixNorms n;
  n.l11 = x.data().lpNorm<1>();
  n.lmax = x.data().lpNorm<Eigen::Infinity>();
  n.frobenius = x.data().norm();
  SvdResult r = svd(x);
  for (double s : r.singular_values) n.nuclear += s;
  n.spectral = r.rank > 0 ? r.singular_values.front() : 0.0;
  return n;
}

SparsifiedGradient spectral_atomo(const Tensor& x, SparsityBudget s_prime,
                                  RngStream& rng) {
  AtomicDecomposition d = decompose_svd(x);
  if (s_prime.s > static_cast<double>(d.atoms.size()))
    throw InfeasibleBudgetError("spectral budget " + std::to_string(s_prime.s) +
                                " exceeds rank " +
                                std::to_string(d.atoms.size()));
  ProbabilityVector p = atomo_probabilities_sorted(d.coefficients, s_prime);
  return sample_sparsification(d, p, rng);
}

SparsificationComparison compare_costs(const Tensor& x, SparsityBudget s) {
  MatrixNorms norms = matrix_norms(x);
  const double nm = static_cast<double>(x.rows() + x.cols());

  SparsificationComparison c;
  c.budget_entrywise = s.s;
  c.budget_svd = s.s / nm;
  c.comm_cost_entrywise = s.s;
  c.comm_cost_svd = c.budget_svd * nm;

  c.entrywise_balanced =
      norms.lmax > 0.0 && s.s <= norms.l11 / norms.lmax;
  c.svd_balanced =
      norms.spectral > 0.0 && c.budget_svd <= norms.nuclear / norms.spectral;

  const double nnz =
      static_cast<double>((x.data().array() != 0.0).count());
  if (c.entrywise_balanced) {
    c.second_moment_entrywise = norms.l11 * norms.l11 / s.s;
  } else if (s.s > nnz) {
    c.second_moment_entrywise = norms.frobenius * norms.frobenius;
  } else {
    ProbabilityVector p = atomo_probabilities_sorted(x.data(), s);
    c.second_moment_entrywise = expected_second_moment(x.data(), p);
  }

  AtomicDecomposition d = decompose_svd(x);
  if (c.svd_balanced) {
    c.second_moment_svd = norms.nuclear * norms.nuclear / c.budget_svd;
  } else if (c.budget_svd > static_cast<double>(d.atoms.size())) {
    // Budget exceeds the rank: the SVD route keeps everything and the
    // best attainable second moment is the dense one.
    c.second_moment_svd = norms.frobenius * norms.frobenius;
  } else {
    ProbabilityVector p =
        atomo_probabilities_sorted(d.coefficients, {c.budget_svd});
    c.second_moment_svd = expected_second_moment(d.coefficients, p);
  }

  c.svd_wins = nm * norms.nuclear * norms.nuclear <= norms.l11 * norms.l11;
  return c;
}

std::string SparsificationComparison::to_json() const {
  nlohmann::ordered_json j;
  j["budget_entrywise"] = budget_entrywise;
  j["budget_svd"] = budget_svd;
  j["comm_cost_entrywise"] = comm_cost_entrywise;
  j["comm_cost_svd"] = comm_cost_svd;
  j["second_moment_entrywise"] = second_moment_entrywise;
  j["second_moment_svd"] = second_moment_svd;
  j["svd_wins"] = svd_wins;
  j["entrywise_balanced"] = entrywise_balanced;
  j["svd_balanced"] = svd_balanced;
  return j.dump(2);
}

}  // namespace atomo
