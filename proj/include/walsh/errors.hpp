#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace walsh {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition: bad length, cap exceeded, mismatched operands.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A Walsh polynomial has a (numerically) zero value on its dyadic grid, so
/// its XOR-circulant matrix is singular and no inverse polynomial exists.
class SingularPolynomial : public Error {
 public:
  SingularPolynomial(const std::string& what, std::size_t grid_index, double min_abs_value,
                     double at_u = std::nan(""))
      : Error(what), grid_index_(grid_index), min_abs_value_(min_abs_value), at_u_(at_u) {}

  std::size_t grid_index() const noexcept { return grid_index_; }
  double min_abs_value() const noexcept { return min_abs_value_; }
  /// Rescaled time at which the polynomial was frozen, NaN if not applicable.
  double at_u() const noexcept { return at_u_; }

 private:
  std::size_t grid_index_;
  double min_abs_value_;
  double at_u_;
};

/// A tvDARMA block system could not be solved.
class SingularBlock : public Error {
 public:
  SingularBlock(const std::string& what, std::size_t block_index, double rcond)
      : Error(what), block_index_(block_index), rcond_(rcond) {}

  std::size_t block_index() const noexcept { return block_index_; }
  /// Reciprocal condition estimate of the block matrix (0 when rank deficient).
  double rcond() const noexcept { return rcond_; }

 private:
  std::size_t block_index_;
  double rcond_;
};

}  // namespace walsh
