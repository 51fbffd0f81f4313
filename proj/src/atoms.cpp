#include <atomo/atoms.hpp>

#include <atomo/errors.hpp>

namespace atomo {

AtomicDecomposition decompose_entrywise(const Tensor& t) {
  AtomicDecomposition d;
  d.kind = DecompositionKind::Entrywise;
  d.original_shape = t.shape();
  d.coefficients = t.data();
  d.atoms.reserve(static_cast<std::size_t>(t.size()));
  for (Eigen::Index i = 0; i < t.size(); ++i)
    d.atoms.push_back(StandardBasisAtom{static_cast<std::uint32_t>(i)});
  return d;
}

SvdResult svd(const Tensor& m) {
  if (!m.is_matrix()) throw ShapeError("svd: input must be rank-2");
  return jacobi_svd(m.as_matrix());
}

AtomicDecomposition decompose_svd(const Tensor& m) {
  SvdResult r = svd(m);
  AtomicDecomposition d;
  d.kind = DecompositionKind::Svd;
  d.original_shape = m.shape();
  d.coefficients = Eigen::VectorXd(r.rank);
  d.atoms.reserve(static_cast<std::size_t>(r.rank));
  for (int i = 0; i < r.rank; ++i) {
    d.coefficients(i) = r.singular_values[i];
    d.atoms.push_back(RankOneAtom{std::move(r.u_vectors[i]),
                                  std::move(r.v_vectors[i])});
  }
  return d;
}

Tensor reshape_conv(const Tensor& t) {
  if (t.rank() != 4) throw ShapeError("reshape_conv: input must be rank-4");
  const auto& s = t.shape();
  if (s[2] != s[3])
    throw ShapeError("reshape_conv: last two dimensions must be equal");
  const Eigen::Index xy = s[0] * s[1];
  const Eigen::Index k2 = s[2] * s[3];
  std::vector<Eigen::Index> shape =
      (xy % 2 == 0) ? std::vector<Eigen::Index>{xy / 2, 2 * k2}
                    : std::vector<Eigen::Index>{xy, k2};
  return Tensor(std::move(shape), t.data());
}

Tensor reconstruct(const AtomicDecomposition& d) {
  if (d.coefficients.size() != static_cast<Eigen::Index>(d.atoms.size()))
    throw ShapeError("reconstruct: coefficient/atom length mismatch");
  Tensor out = Tensor::zeros(d.original_shape);
  if (d.kind == DecompositionKind::Svd) {
    if (out.rank() != 2) throw ShapeError("reconstruct: SVD needs rank-2");
    const Eigen::Index cols = out.shape()[1];
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
      const auto& a = std::get<RankOneAtom>(d.atoms[i]);
      const double w = d.coefficients(static_cast<Eigen::Index>(i));
      for (Eigen::Index r = 0; r < a.u.size(); ++r)
        for (Eigen::Index c = 0; c < a.v.size(); ++c)
          out.data()(r * cols + c) += w * a.u(r) * a.v(c);
    }
  } else {
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
      const auto& a = std::get<StandardBasisAtom>(d.atoms[i]);
      out.data()(static_cast<Eigen::Index>(a.index)) +=
          d.coefficients(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

}  // namespace atomo
