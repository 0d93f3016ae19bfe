#include "walsh/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

#include "walsh/errors.hpp"

namespace walsh {

DyadicIndex checked_index(DyadicIndex n) {
  if (n > kMaxDyadicIndex) {
    throw InvalidArgument("dyadic index " + std::to_string(n) + " exceeds 2^62 - 1");
  }
  return n;
}

int exact_log2(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw InvalidArgument("length " + std::to_string(n) + " is not a power of two");
  }
  return std::countr_zero(n);
}

std::size_t next_power_of_two(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

std::uint64_t reverse_bits(std::uint64_t j, int bits) noexcept {
  std::uint64_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (j & 1U);
    j >>= 1;
  }
  return r;
}

DyadicPoint::DyadicPoint(std::uint64_t numerator, int resolution)
    : numerator_(numerator), resolution_(resolution) {
  if (resolution < 0 || resolution > 62) {
    throw InvalidArgument("dyadic point resolution must lie in [0, 62]");
  }
  if (numerator >= (std::uint64_t{1} << resolution)) {
    throw InvalidArgument("dyadic point numerator must be < 2^resolution");
  }
}

double DyadicPoint::value() const noexcept {
  return static_cast<double>(numerator_) / static_cast<double>(std::uint64_t{1} << resolution_);
}

int DyadicPoint::bit(int k) const noexcept {
  if (k < 1 || k > resolution_) return 0;
  return static_cast<int>((numerator_ >> (resolution_ - k)) & 1U);
}

DyadicPoint DyadicPoint::at_resolution(int m) const {
  if (m < resolution_) {
    throw InvalidArgument("cannot coarsen a dyadic point");
  }
  return DyadicPoint(numerator_ << (m - resolution_), m);
}

bool operator==(const DyadicPoint& a, const DyadicPoint& b) noexcept {
  const int m = std::max(a.resolution_, b.resolution_);
  return (a.numerator_ << (m - a.resolution_)) == (b.numerator_ << (m - b.resolution_));
}

DyadicPoint dyadic_add_points(const DyadicPoint& x, const DyadicPoint& y) {
  const int m = std::max(x.resolution(), y.resolution());
  const auto xs = x.at_resolution(m);
  const auto ys = y.at_resolution(m);
  return DyadicPoint(xs.numerator() ^ ys.numerator(), m);
}

Sign rademacher(int k, const DyadicPoint& x) noexcept {
  return x.bit(k + 1) ? Sign::minus : Sign::plus;
}

Sign walsh(DyadicIndex n, const DyadicPoint& x) noexcept {
  // Bits of n at positions >= resolution select zero digits of x.
  const int m = x.resolution();
  const std::uint64_t mask = m >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1);
  const int parity = std::popcount((n & mask) & reverse_bits(x.numerator(), m)) & 1;
  return parity ? Sign::minus : Sign::plus;
}

std::vector<DyadicPoint> grid_points(int m) {
  if (m < 0 || m > kMaxGridExponent) {
    throw InvalidArgument("grid exponent " + std::to_string(m) + " outside [0, 24]");
  }
  const std::uint64_t n = std::uint64_t{1} << m;
  std::vector<DyadicPoint> points;
  points.reserve(n);
  for (std::uint64_t j = 0; j < n; ++j) points.emplace_back(j, m);
  return points;
}

HadamardMatrix::HadamardMatrix(int order_exponent) : m_(order_exponent) {
  if (m_ < 0 || m_ > kMaxHadamardExponent) {
    throw InvalidArgument("Hadamard exponent " + std::to_string(m_) + " outside [0, 12]");
  }
  n_ = std::size_t{1} << m_;
  entries_.resize(n_ * n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::uint64_t rj = reverse_bits(j, m_);
    for (std::size_t n = 0; n < n_; ++n) {
      entries_[j * n_ + n] = (std::popcount(n & rj) & 1) ? -1 : 1;
    }
  }
}

HadamardMatrix hadamard_matrix(int m) { return HadamardMatrix(m); }

void fwht_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  const int m = exact_log2(n);

  // Natural (Hadamard) order butterflies.
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      double* lo = v.data() + i;
      double* hi = lo + h;
      for (std::size_t j = 0; j < h; ++j) {
        const double a = lo[j];
        const double b = hi[j];
        lo[j] = a + b;
        hi[j] = a - b;
      }
    }
  }

  // Walsh (Paley) ordering of the grid index: out[j] = natural[rev(j)].
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t r = reverse_bits(j, m);
    if (j < r) std::swap(v[j], v[r]);
  }
}

std::vector<double> fwht(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  fwht_inplace(out);
  return out;
}

}  // namespace walsh
