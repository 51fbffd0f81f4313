#include <atomo/codec.hpp>

#include <limits>

#include <atomo/errors.hpp>
#include <atomo/wire_io.hpp>

namespace atomo {

std::vector<std::uint8_t> encode(const SparsifiedGradient& sg) {
  if (sg.kept_atoms.size() > std::numeric_limits<std::uint32_t>::max())
    throw CapacityError("atom count exceeds u32");
  if (sg.decomposition_kind == DecompositionKind::Svd &&
      sg.original_shape.size() != 2)
    throw ShapeError("encode: SVD message needs a rank-2 shape");

  ByteWriter w;
  w.raw("ATMO", 4);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(sg.decomposition_kind));
  w.u8(static_cast<std::uint8_t>(sg.original_shape.size()));
  for (Eigen::Index d : sg.original_shape)
    w.u64(static_cast<std::uint64_t>(d));
  w.u32(static_cast<std::uint32_t>(sg.kept_atoms.size()));
  w.f64(sg.budget_used);

  for (const auto& k : sg.kept_atoms) {
    if (sg.decomposition_kind == DecompositionKind::Entrywise) {
      w.u32(std::get<StandardBasisAtom>(k.atom).index);
      w.f32(static_cast<float>(k.scaled_weight));
    } else {
      const auto& a = std::get<RankOneAtom>(k.atom);
      w.f32(static_cast<float>(k.scaled_weight));
      for (Eigen::Index i = 0; i < a.u.size(); ++i)
        w.f32(static_cast<float>(a.u(i)));
      for (Eigen::Index i = 0; i < a.v.size(); ++i)
        w.f32(static_cast<float>(a.v(i)));
    }
  }
  return w.take();
}

SparsifiedGradient decode(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect("ATMO", 4, "magic");
  const std::uint8_t version = r.u8();
  if (version != kWireVersion)
    throw ParseError("unsupported version " + std::to_string(version),
                     r.offset() - 1);
  const std::uint8_t kind_raw = r.u8();
  if (kind_raw > 1)
    throw ParseError("unknown decomposition kind " + std::to_string(kind_raw),
                     r.offset() - 1);
  const auto kind = static_cast<DecompositionKind>(kind_raw);

  const std::uint8_t rank = r.u8();
  SparsifiedGradient sg;
  sg.decomposition_kind = kind;
  Eigen::Index total = 1;
  for (int i = 0; i < rank; ++i) {
    const auto d = static_cast<Eigen::Index>(r.u64());
    if (d <= 0) throw ParseError("non-positive dimension", r.offset() - 8);
    sg.original_shape.push_back(d);
    total *= d;
  }
  if (kind == DecompositionKind::Svd && rank != 2)
    throw ParseError("SVD message with rank != 2", r.offset());

  const std::uint32_t count = r.u32();
  sg.budget_used = r.f64();

  const Eigen::Index n = kind == DecompositionKind::Svd ? sg.original_shape[0]
                                                        : 0;
  const Eigen::Index m = kind == DecompositionKind::Svd ? sg.original_shape[1]
                                                        : 0;
  const std::size_t per_atom =
      kind == DecompositionKind::Entrywise
          ? 8
          : 4 * static_cast<std::size_t>(1 + n + m);
  r.require(per_atom * count, "atom payload");

  sg.kept_atoms.reserve(count);
  for (std::uint32_t a = 0; a < count; ++a) {
    if (kind == DecompositionKind::Entrywise) {
      const std::uint32_t index = r.u32();
      if (static_cast<Eigen::Index>(index) >= total)
        throw ParseError("atom index out of range", r.offset() - 4);
      const double weight = r.f32();
      sg.kept_atoms.push_back({StandardBasisAtom{index}, weight});
    } else {
      const double weight = r.f32();
      RankOneAtom atom{Eigen::VectorXd(n), Eigen::VectorXd(m)};
      for (Eigen::Index i = 0; i < n; ++i) atom.u(i) = r.f32();
      for (Eigen::Index i = 0; i < m; ++i) atom.v(i) = r.f32();
      sg.kept_atoms.push_back({std::move(atom), weight});
    }
  }
  if (!r.exhausted()) throw ParseError("trailing bytes", r.offset());
  return sg;
}

CostReport message_cost(const SparsifiedGradient& sg) {
  CostReport c;
  const std::uint64_t k = sg.kept_atoms.size();
  if (sg.decomposition_kind == DecompositionKind::Entrywise) {
    c.reals_transmitted = k;
    c.index_overhead_bytes = 4 * k;
  } else {
    const auto n = static_cast<std::uint64_t>(sg.original_shape[0]);
    const auto m = static_cast<std::uint64_t>(sg.original_shape[1]);
    c.reals_transmitted = k * (n + m + 1);
  }
  c.bytes_on_wire = encode(sg).size();
  return c;
}

}  // namespace atomo
