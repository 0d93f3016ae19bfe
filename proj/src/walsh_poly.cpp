#include "walsh/walsh_poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "walsh/errors.hpp"

namespace walsh {

WalshPolynomial::WalshPolynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) {
    throw InvalidArgument("Walsh polynomial needs at least one coefficient");
  }
  coeffs_.resize(next_power_of_two(coeffs_.size()), 0.0);
}

WalshPolynomial WalshPolynomial::unit(std::size_t length) {
  std::vector<double> c(next_power_of_two(std::max<std::size_t>(length, 1)), 0.0);
  c[0] = 1.0;
  return WalshPolynomial(std::move(c));
}

int WalshPolynomial::order_exponent() const noexcept {
  return std::countr_zero(coeffs_.size());
}

WalshPolynomial WalshPolynomial::padded(std::size_t length) const {
  if (!is_power_of_two(length) || length < coeffs_.size()) {
    throw InvalidArgument("padding length must be a power of two no smaller than " +
                          std::to_string(coeffs_.size()));
  }
  std::vector<double> c(coeffs_);
  c.resize(length, 0.0);
  return WalshPolynomial(std::move(c));
}

double evaluate(const WalshPolynomial& poly, const DyadicPoint& x) {
  double sum = 0.0;
  const auto c = poly.coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != 0.0) sum += c[j] * to_int(walsh(j, x));
  }
  return sum;
}

std::vector<double> evaluate_grid(const WalshPolynomial& poly) { return fwht(poly.coefficients()); }

WalshPolynomial from_grid(std::span<const double> values) {
  std::vector<double> c = fwht(values);
  const double scale = 1.0 / static_cast<double>(c.size());
  for (double& v : c) v *= scale;
  return WalshPolynomial(std::move(c));
}

namespace {

bool is_unit_poly(const WalshPolynomial& p) {
  const auto c = p.coefficients();
  return c[0] == 1.0 && std::all_of(c.begin() + 1, c.end(), [](double v) { return v == 0.0; });
}

}  // namespace

WalshPolynomial xor_convolve(const WalshPolynomial& a, const WalshPolynomial& b) {
  const std::size_t n = std::max(a.size(), b.size());
  // e₀ is the unit; skipping the transforms keeps the other operand bit-exact.
  if (is_unit_poly(a)) return b.padded(n);
  if (is_unit_poly(b)) return a.padded(n);
  std::vector<double> ga = evaluate_grid(a.padded(n));
  const std::vector<double> gb = evaluate_grid(b.padded(n));
  for (std::size_t j = 0; j < n; ++j) ga[j] *= gb[j];
  return from_grid(ga);
}

std::vector<double> SigmaMatrix::multiply(std::span<const double> v) const {
  const std::size_t n = size();
  if (v.size() != n) {
    throw InvalidArgument("sigma matrix / vector size mismatch");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += source_[i ^ j] * v[j];
    out[i] = s;
  }
  return out;
}

SigmaMatrix sigma_matrix(const WalshPolynomial& poly) { return SigmaMatrix(poly); }

double determinant_lemma(const WalshPolynomial& poly) {
  double det = 1.0;
  for (double v : evaluate_grid(poly)) det *= v;
  return det;
}

std::size_t first_singular_grid_index(std::span<const double> grid_values, double rel_tol) {
  double scale = 0.0;
  for (double v : grid_values) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < grid_values.size(); ++j) {
    if (!(std::abs(grid_values[j]) > rel_tol * scale)) return j;
  }
  return grid_values.size();
}

WalshPolynomial invert(const WalshPolynomial& poly) {
  std::vector<double> grid = evaluate_grid(poly);
  const std::size_t bad = first_singular_grid_index(grid);
  if (bad != grid.size()) {
    throw SingularPolynomial("Walsh polynomial vanishes at grid point x_" + std::to_string(bad) +
                                 " = " + std::to_string(bad) + "/" + std::to_string(grid.size()),
                             bad, std::abs(grid[bad]));
  }
  for (double& v : grid) v = 1.0 / v;
  return from_grid(grid);
}

WalshPolynomial darma_to_dma(const WalshPolynomial& ar, const WalshPolynomial& ma) {
  const std::size_t n = std::max(ar.size(), ma.size());
  return xor_convolve(invert(ar.padded(n)), ma.padded(n));
}

WalshPolynomial darma_to_dar(const WalshPolynomial& ar, const WalshPolynomial& ma) {
  const std::size_t n = std::max(ar.size(), ma.size());
  return xor_convolve(invert(ma.padded(n)), ar.padded(n));
}

bool has_top_half_coefficient(const WalshPolynomial& poly) {
  const auto c = poly.coefficients();
  if (c.size() == 1) return true;
  return std::any_of(c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2), c.end(),
                     [](double v) { return v != 0.0; });
}

}  // namespace walsh
