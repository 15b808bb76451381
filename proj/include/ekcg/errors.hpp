#pragma once

#include <stdexcept>
#include <string>

namespace ekcg {

/// Operand shapes do not agree.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A construction-time invariant was violated (non-symmetric matrix, bad
/// partition, malformed configuration, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input stream (Matrix Market, partition file, experiment spec).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical rank deficiency detected by a Cholesky factorization.
///
/// `pivot` is the column at which the factorization failed and `block` the
/// preconditioner block index when raised while building a block-Jacobi
/// factor (-1 otherwise).
class Breakdown : public std::runtime_error {
 public:
  Breakdown(const std::string& what, long pivot, long block = -1)
      : std::runtime_error(what), pivot_(pivot), block_(block) {}

  long pivot() const noexcept { return pivot_; }
  long block() const noexcept { return block_; }

 private:
  long pivot_;
  long block_;
};

}  // namespace ekcg
