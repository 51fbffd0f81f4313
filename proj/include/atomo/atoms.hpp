#ifndef ATOMO_ATOMS_HPP
#define ATOMO_ATOMS_HPP

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include <atomo/svd.hpp>
#include <atomo/tensor.hpp>

namespace atomo {

enum class DecompositionKind : std::uint8_t { Entrywise = 0, Svd = 1 };

/// Standard basis atom e_i, addressed by row-major flat index.
struct StandardBasisAtom {
  std::uint32_t index;
};

/// Rank-1 atom u v^T with ||u|| = ||v|| = 1.
struct RankOneAtom {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

using AtomDescriptor = std::variant<StandardBasisAtom, RankOneAtom>;

/// g = sum_i lambda_i a_i with pairwise orthonormal unit atoms.
struct AtomicDecomposition {
  Eigen::VectorXd coefficients;
  std::vector<AtomDescriptor> atoms;
  std::vector<Eigen::Index> original_shape;
  DecompositionKind kind = DecompositionKind::Entrywise;
};

/// Coefficients are the tensor entries in row-major order, atoms the
/// matching standard basis vectors. Exact round-trip.
AtomicDecomposition decompose_entrywise(const Tensor& t);

/// Thin SVD of a rank-2 tensor (one-sided Jacobi, see svd.hpp).
SvdResult svd(const Tensor& m);

/// Coefficients are the singular values, atoms the rank-1 outer products.
AtomicDecomposition decompose_svd(const Tensor& m);

/// Reshapes a conv gradient [x, y, k, k] into [x*y/2, 2k^2] (row-major
/// regrouping of the flat entries). Falls back to [x*y, k^2] when x*y is
/// odd.
Tensor reshape_conv(const Tensor& t);

/// Materializes sum_i lambda_i a_i into original_shape.
Tensor reconstruct(const AtomicDecomposition& d);

}  // namespace atomo

#endif  // ATOMO_ATOMS_HPP
