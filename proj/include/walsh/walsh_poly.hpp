#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "walsh/dyadic.hpp"

namespace walsh {

/// Relative threshold below which a grid value counts as zero.
inline constexpr double kSingularityTolerance = 1e-9;

/// φ(x) = Σ_{j<L} c_j W(j, x) with L a power of two.
///
/// Coefficient vectors of other lengths are zero-padded on construction;
/// trailing zeros do not change the represented function.
class WalshPolynomial {
 public:
  /// The unit polynomial e₀.
  WalshPolynomial() : coeffs_{1.0} {}
  explicit WalshPolynomial(std::vector<double> coefficients);

  static WalshPolynomial unit(std::size_t length = 1);

  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  int order_exponent() const noexcept;
  /// Coefficient c_j, zero past the stored length.
  double operator[](std::size_t j) const noexcept { return j < coeffs_.size() ? coeffs_[j] : 0.0; }

  /// Zero-padded copy of length `length` (a power of two >= size()).
  WalshPolynomial padded(std::size_t length) const;

 private:
  std::vector<double> coeffs_;
};

double evaluate(const WalshPolynomial& poly, const DyadicPoint& x);

/// (φ(x_0), …, φ(x_{L-1})) on the grid of the polynomial's own resolution.
std::vector<double> evaluate_grid(const WalshPolynomial& poly);

/// Inverse of evaluate_grid: coefficients (1/2^m)·H_W(m)·values.
WalshPolynomial from_grid(std::span<const double> values);

/// c_h = Σ_j a_j b_{j⊕h}; operands are padded to a common length.
WalshPolynomial xor_convolve(const WalshPolynomial& a, const WalshPolynomial& b);

/// XOR-circulant matrix with entries c_{i⊕j}.
class SigmaMatrix {
 public:
  explicit SigmaMatrix(WalshPolynomial source) : source_(std::move(source)) {}

  std::size_t size() const noexcept { return source_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return source_[i ^ j]; }
  const WalshPolynomial& source() const noexcept { return source_; }

  std::vector<double> multiply(std::span<const double> v) const;

 private:
  WalshPolynomial source_;
};

SigmaMatrix sigma_matrix(const WalshPolynomial& poly);

/// det Σ computed as the product of grid values.
double determinant_lemma(const WalshPolynomial& poly);

/// Index of the first grid value with |φ(x_j)| <= tol·max|φ|, or size() if none.
std::size_t first_singular_grid_index(std::span<const double> grid_values,
                                      double rel_tol = kSingularityTolerance);

/// η with φ·η = 1. Throws SingularPolynomial when φ vanishes on the grid.
WalshPolynomial invert(const WalshPolynomial& poly);

/// MA coefficients K = η_ar ⊛ ma of the equivalent dyadic moving average.
WalshPolynomial darma_to_dma(const WalshPolynomial& ar, const WalshPolynomial& ma);

/// AR coefficients η_ma ⊛ ar of the equivalent dyadic autoregression.
WalshPolynomial darma_to_dar(const WalshPolynomial& ar, const WalshPolynomial& ma);

/// True when some coefficient with index in [L/2, L) is nonzero (always true for L = 1).
bool has_top_half_coefficient(const WalshPolynomial& poly);

}  // namespace walsh
