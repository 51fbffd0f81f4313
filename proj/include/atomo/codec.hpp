#ifndef ATOMO_CODEC_HPP
#define ATOMO_CODEC_HPP

#include <cstdint>
#include <vector>

#include <atomo/sparsifier.hpp>

namespace atomo {

/// Wire format v1, little-endian throughout:
///
///   magic "ATMO" | version u8 | kind u8 | rank u8 | rank x dims u64
///   | atom count u32 | budget f64
///
/// followed by one payload record per atom:
///   kind 0 (entry-wise): flat index u32, weight f32
///   kind 1 (SVD):        weight f32, n x f32 (u), m x f32 (v)
///
/// Weights and vectors are narrowed to 32-bit on the wire; internal math
/// stays 64-bit.
constexpr std::uint8_t kWireVersion = 1;

struct CostReport {
  std::uint64_t reals_transmitted = 0;  // Table-style accounting units
  std::uint64_t bytes_on_wire = 0;      // actual encoded length
  std::uint64_t index_overhead_bytes = 0;
};

std::vector<std::uint8_t> encode(const SparsifiedGradient& sg);
SparsifiedGradient decode(const std::vector<std::uint8_t>& bytes);

/// reals_transmitted counts the per-atom weight: k for entry-wise,
/// k * (n + m + 1) for SVD triplets.
CostReport message_cost(const SparsifiedGradient& sg);

}  // namespace atomo

#endif  // ATOMO_CODEC_HPP
