#pragma once

// Dyadic (XOR) arithmetic, Rademacher and Walsh functions on dyadic
// rationals, Walsh-ordered Hadamard matrices and the fast Walsh-Hadamard
// transform.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace walsh {

/// Time index, lag or polynomial index. Values must stay below 2^62.
using DyadicIndex = std::uint64_t;

inline constexpr DyadicIndex kMaxDyadicIndex = (DyadicIndex{1} << 62) - 1;
inline constexpr int kMaxGridExponent = 24;
inline constexpr int kMaxHadamardExponent = 12;

/// Throws InvalidArgument when `n` exceeds the index cap.
DyadicIndex checked_index(DyadicIndex n);

/// m ⊕ n: bitwise exclusive-or of the binary expansions.
constexpr DyadicIndex dyadic_add(DyadicIndex a, DyadicIndex b) noexcept { return a ^ b; }

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// log2 of a power of two; throws InvalidArgument otherwise.
int exact_log2(std::size_t n);

/// Smallest power of two >= n (n >= 1).
std::size_t next_power_of_two(std::size_t n);

/// Reverses the low `bits` bits of `j`.
std::uint64_t reverse_bits(std::uint64_t j, int bits) noexcept;

/// A point x = j / 2^m of [0,1) with a finite binary expansion.
class DyadicPoint {
 public:
  DyadicPoint() = default;
  /// Throws InvalidArgument unless 0 <= numerator < 2^resolution, resolution <= 62.
  DyadicPoint(std::uint64_t numerator, int resolution);

  std::uint64_t numerator() const noexcept { return numerator_; }
  int resolution() const noexcept { return resolution_; }
  double value() const noexcept;

  /// k-th fractional bit x_k (k >= 1); zero beyond the resolution.
  int bit(int k) const noexcept;

  /// Same point expressed at a finer (or equal) resolution.
  DyadicPoint at_resolution(int m) const;

  /// Equal by value, regardless of resolution.
  friend bool operator==(const DyadicPoint& a, const DyadicPoint& b) noexcept;

 private:
  std::uint64_t numerator_ = 0;
  int resolution_ = 0;
};

/// x ⊕ y at the common resolution max(m_x, m_y).
DyadicPoint dyadic_add_points(const DyadicPoint& x, const DyadicPoint& y);

enum class Sign : int { minus = -1, plus = 1 };

constexpr int to_int(Sign s) noexcept { return static_cast<int>(s); }
constexpr Sign operator*(Sign a, Sign b) noexcept { return a == b ? Sign::plus : Sign::minus; }

/// φ_k(x) = (-1)^{x_{k+1}}.
Sign rademacher(int k, const DyadicPoint& x) noexcept;

/// W(n, x): product of the Rademacher functions selected by the bits of n.
Sign walsh(DyadicIndex n, const DyadicPoint& x) noexcept;

/// W(n, j/2^m) as ±1 without constructing a point.
inline int walsh_on_grid(DyadicIndex n, std::uint64_t j, int m) noexcept {
  return (__builtin_popcountll(n & reverse_bits(j, m)) & 1) ? -1 : 1;
}

/// x_j = j / 2^m for j = 0..2^m-1.
std::vector<DyadicPoint> grid_points(int m);

/// Walsh-ordered Hadamard matrix, entry(j, n) = W(n, x_j).
class HadamardMatrix {
 public:
  explicit HadamardMatrix(int order_exponent);

  int order_exponent() const noexcept { return m_; }
  std::size_t size() const noexcept { return n_; }
  int operator()(std::size_t row, std::size_t col) const noexcept {
    return entries_[row * n_ + col];
  }

 private:
  int m_;
  std::size_t n_;
  std::vector<std::int8_t> entries_;
};

HadamardMatrix hadamard_matrix(int m);

/// In-place H_W(m)·v. The length must be a power of two.
void fwht_inplace(std::span<double> v);

/// Returns H_W(m)·v; fwht(fwht(v)) = 2^m·v.
std::vector<double> fwht(std::span<const double> v);

}  // namespace walsh
