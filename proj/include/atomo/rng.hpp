#ifndef ATOMO_RNG_HPP
#define ATOMO_RNG_HPP

#include <cstdint>
#include <random>

namespace atomo {

/// Counter-derived random stream. The derivation of the per-stream seed
/// from (master_seed, round, worker, layer) is part of the external
/// reproducibility contract:
///
///   h = master_seed
///   for x in [round, worker, layer]:
///       h = splitmix64(h ^ (x * 0x9E3779B97F4A7C15))
///
/// with splitmix64 the standard finalizer. Identical seed material gives
/// an identical draw sequence.
class RngStream {
 public:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t derive_seed(std::uint64_t master_seed,
                                   std::uint64_t round, std::uint64_t worker,
                                   std::uint64_t layer) {
    std::uint64_t h = master_seed;
    for (std::uint64_t x : {round, worker, layer})
      h = splitmix64(h ^ (x * 0x9E3779B97F4A7C15ULL));
    return h;
  }

  RngStream(std::uint64_t master_seed, std::uint64_t round,
            std::uint64_t worker, std::uint64_t layer)
      : gen_(derive_seed(master_seed, round, worker, layer)) {}

  explicit RngStream(std::uint64_t raw_seed) : gen_(raw_seed) {}

  /// Uniform draw in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t uniform_index(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(gen_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace atomo

#endif  // ATOMO_RNG_HPP
