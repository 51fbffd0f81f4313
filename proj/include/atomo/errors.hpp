#ifndef ATOMO_ERRORS_HPP
#define ATOMO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atomo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor/matrix shape mismatch (wrong rank, misaligned lengths, ...).
struct ShapeError : Error {
  using Error::Error;
};

// Input that makes the operation meaningless, e.g. an all-zero vector.
struct DegenerateInputError : Error {
  using Error::Error;
};

// s <= 0.
struct InvalidBudgetError : Error {
  using Error::Error;
};

// s exceeds the number of nonzero coefficients; the feasible set is empty.
struct InfeasibleBudgetError : Error {
  using Error::Error;
};

// p_i = 0 on a coordinate with lambda_i != 0.
struct InfiniteVarianceError : Error {
  using Error::Error;
};

// Wire message too large for the format's fixed-width counters.
struct CapacityError : Error {
  using Error::Error;
};

// Malformed wire message; `offset` is the byte position of the failure.
struct ParseError : Error {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t off)
      : Error(what + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

// Bad CLI flag / config file contents.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace atomo

#endif  // ATOMO_ERRORS_HPP
