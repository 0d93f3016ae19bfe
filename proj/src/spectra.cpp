#include "walsh/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "walsh/errors.hpp"
#include "walsh/parallel.hpp"

namespace walsh {

namespace {

std::vector<double> grid_values(int m) {
  const std::size_t n = std::size_t{1} << m;
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>(j) / static_cast<double>(n);
  return x;
}

void require_power_of_two(std::size_t n, const char* what) {
  if (!is_power_of_two(n)) {
    throw InvalidArgument(std::string(what) + " must be a power of two, got " + std::to_string(n));
  }
}

}  // namespace

SpectralGrid tv_dyadic_density(const ProcessSpec& spec, std::span<const double> u_grid, int m) {
  validate(spec);
  if (m < 0 || m > kMaxGridExponent) {
    throw InvalidArgument("grid exponent m must be in [0, " + std::to_string(kMaxGridExponent) +
                          "], got " + std::to_string(m));
  }
  SpectralGrid grid;
  grid.kind = SpectrumKind::dyadic;
  grid.u_values.assign(u_grid.begin(), u_grid.end());
  grid.x_values = grid_values(m);
  const std::size_t nx = grid.x_values.size();
  grid.values.assign(u_grid.size() * nx, 0.0);
  const double var = spec.innovations.sigma * spec.innovations.sigma;

  // Serial over u: a singular u must be reported deterministically.
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    const WalshPolynomial k = frozen_dma_coefficients(spec, u_grid[i]);
    const std::size_t fine = std::max(nx, k.size());
    const std::vector<double> a = evaluate_grid(k.padded(fine));
    const std::size_t stride = fine / nx;
    for (std::size_t j = 0; j < nx; ++j) {
      const double v = a[j * stride];
      grid.values[i * nx + j] = var * v * v;
    }
  }
  return grid;
}

SpectralGrid tv_fourier_density(const ProcessSpec& spec, std::span<const double> u_grid,
                                std::span<const double> lambda_grid) {
  validate(spec);
  if (spec.kind != ProcessKind::tvdma && spec.kind != ProcessKind::modulated) {
    throw InvalidArgument("Fourier density needs an MA-type process (tvDMA or modulated), got " +
                          std::string(to_string(spec.kind)));
  }
  SpectralGrid grid;
  grid.kind = SpectrumKind::fourier;
  grid.u_values.assign(u_grid.begin(), u_grid.end());
  grid.x_values.assign(lambda_grid.begin(), lambda_grid.end());
  const std::size_t nl = lambda_grid.size();
  grid.values.assign(u_grid.size() * nl, 0.0);
  const double scale =
      spec.innovations.sigma * spec.innovations.sigma / (2.0 * std::numbers::pi);

  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    const WalshPolynomial a = convert_spec_frozen(spec, u_grid[i]).second;
    for (std::size_t j = 0; j < nl; ++j) {
      std::complex<double> sum = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        sum += a[k] * std::polar(1.0, -lambda_grid[j] * static_cast<double>(k));
      }
      grid.values[i * nl + j] = scale * std::norm(sum);
    }
  }
  return grid;
}

double dma_covariance(const WalshPolynomial& coeffs, double sigma, DyadicIndex tau) {
  checked_index(tau);
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * coeffs[k ^ tau];
  return sigma * sigma * sum;
}

double covariance_from_density(std::span<const double> density_row, DyadicIndex tau) {
  const std::size_t n = density_row.size();
  require_power_of_two(n, "density row length");
  if (tau >= n) {
    throw InvalidArgument("lag " + std::to_string(tau) + " is outside the density grid of size " +
                          std::to_string(n));
  }
  const int m = exact_log2(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += walsh_on_grid(tau, j, m) * density_row[j];
  return sum / static_cast<double>(n);
}

double empirical_dyadic_covariance(std::span<const double> data, DyadicIndex tau,
                                   std::size_t start, std::size_t N) {
  require_power_of_two(N, "segment length");
  if (start % N != 0) {
    throw InvalidArgument("segment start " + std::to_string(start) +
                          " is not aligned to a multiple of N = " + std::to_string(N));
  }
  if (start + N > data.size()) throw InvalidArgument("segment extends past the end of the data");
  if (tau >= N) throw InvalidArgument("lag must be smaller than the segment length");

  const auto seg = data.subspan(start, N);
  double mean = 0.0;
  for (double v : seg) mean += v;
  mean /= static_cast<double>(N);
  double sum = 0.0;
  for (std::size_t t = 0; t < N; ++t) sum += (seg[t] - mean) * (seg[t ^ tau] - mean);
  return sum / static_cast<double>(N);
}

double empirical_dyadic_covariance(const SamplePath& path, DyadicIndex tau, std::size_t start,
                                   std::size_t N) {
  return empirical_dyadic_covariance(std::span<const double>(path.values), tau, start, N);
}

std::vector<double> finite_walsh_transform(std::span<const double> data) {
  require_power_of_two(data.size(), "data length");
  return fwht(data);
}

Periodogram walsh_periodogram(std::span<const double> data) {
  Periodogram p;
  p.N = data.size();
  p.I_values = finite_walsh_transform(data);
  const double inv_n = 1.0 / static_cast<double>(p.N);
  for (double& v : p.I_values) v = v * v * inv_n;
  p.x_values = grid_values(exact_log2(p.N));
  return p;
}

Periodogram smooth_periodogram(const Periodogram& p, std::size_t half_width) {
  Periodogram out = p;
  if (half_width == 0 || p.I_values.empty()) return out;
  const auto n = static_cast<std::ptrdiff_t>(p.I_values.size());
  const auto w = static_cast<std::ptrdiff_t>(half_width);
  // Half-sample mirror: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} x_{n-2} ...
  auto mirror = [n](std::ptrdiff_t i) {
    std::ptrdiff_t k = ((i % (2 * n)) + 2 * n) % (2 * n);
    return k >= n ? 2 * n - 1 - k : k;
  };
  const double norm = 1.0 / static_cast<double>(2 * w + 1);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::ptrdiff_t d = -w; d <= w; ++d) sum += p.I_values[static_cast<std::size_t>(mirror(i + d))];
    out.I_values[static_cast<std::size_t>(i)] = sum * norm;
  }
  return out;
}

std::vector<Periodogram> segmented_local_spectrum(std::span<const double> data, std::size_t N,
                                                  std::size_t step) {
  const std::size_t T = data.size();
  require_power_of_two(N, "segment length N");
  if (N > T) {
    throw InvalidArgument("segment length " + std::to_string(N) + " exceeds series length " +
                          std::to_string(T));
  }
  if (step < 1) throw InvalidArgument("segment step must be >= 1");

  const std::size_t count = (T - N) / step + 1;
  std::vector<Periodogram> out(count);
  parallel_for(count, [&](std::size_t s) {
    const std::size_t start = s * step;
    Periodogram p = walsh_periodogram(data.subspan(start, N));
    p.segment_start = start;
    p.u0 = (static_cast<double>(start) + static_cast<double>(N) / 2.0) / static_cast<double>(T);
    out[s] = std::move(p);
  });
  return out;
}

std::vector<Periodogram> segmented_local_spectrum(const SamplePath& path, std::size_t N,
                                                  std::size_t step) {
  return segmented_local_spectrum(std::span<const double>(path.values), N, step);
}

std::vector<double> walsh_spectrum_from_cov(const CovarianceSequence& cov, int m) {
  if (m < 0 || m > kMaxGridExponent) throw InvalidArgument("grid exponent m out of range");
  const std::size_t n = std::size_t{1} << m;
  if (cov.values.size() < n) {
    throw InvalidArgument("covariance sequence has " + std::to_string(cov.values.size()) +
                          " lags, need at least " + std::to_string(n));
  }
  return fwht(std::span<const double>(cov.values.data(), n));
}

std::vector<double> covariance_from_spectrum(std::span<const double> spectrum) {
  require_power_of_two(spectrum.size(), "spectrum length");
  std::vector<double> r = fwht(spectrum);
  const double inv_n = 1.0 / static_cast<double>(r.size());
  for (double& v : r) v *= inv_n;
  return r;
}

}  // namespace walsh
