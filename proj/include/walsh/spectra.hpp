#pragma once

// Model-implied dyadic spectra and covariances, and Walsh periodogram
// estimates computed from data.

#include <cstddef>
#include <span>
#include <vector>

#include "walsh/dyadic.hpp"
#include "walsh/process.hpp"
#include "walsh/walsh_poly.hpp"

namespace walsh {

enum class SpectrumKind { dyadic, fourier };

/// values[i * x_values.size() + j] = g(u_i, x_j) (or f(u_i, λ_j)).
struct SpectralGrid {
  SpectrumKind kind = SpectrumKind::dyadic;
  std::vector<double> u_values;
  std::vector<double> x_values;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * x_values.size() + j]; }
};

struct Periodogram {
  std::size_t segment_start = 0;
  std::size_t N = 0;
  /// (segment_start + N/2) / T.
  double u0 = 0.5;
  std::vector<double> x_values;
  std::vector<double> I_values;
};

struct CovarianceSequence {
  double u0 = 0.0;
  double sigma = 1.0;
  /// R(τ), τ = 0 … size-1.
  std::vector<double> values;
};

/// g(u, x_j) = σ²(u)·A(u, x_j)² on grid_points(m) for each u. tvDAR/tvDARMA
/// are converted to DMA form at every frozen u first.
/// Throws SingularPolynomial naming the offending u.
SpectralGrid tv_dyadic_density(const ProcessSpec& spec, std::span<const double> u_grid, int m);

/// (σ²/2π)·|Σ_k a_k(u) e^{-iλk}|²; MA-type kinds only (tvDMA, modulated).
SpectralGrid tv_fourier_density(const ProcessSpec& spec, std::span<const double> u_grid,
                                std::span<const double> lambda_grid);

/// σ²·Σ_k a_k a_{k⊕τ}.
double dma_covariance(const WalshPolynomial& coeffs, double sigma, DyadicIndex tau);

/// 2^{-m}·Σ_j W(τ, x_j) g(x_j) for a density sampled on grid_points(m); τ < 2^m.
double covariance_from_density(std::span<const double> density_row, DyadicIndex tau);

/// (1/N)·Σ_t (X_t - X̄)(X_{t⊕τ} - X̄) over the aligned segment [start, start+N).
double empirical_dyadic_covariance(const SamplePath& path, DyadicIndex tau, std::size_t start,
                                   std::size_t N);
double empirical_dyadic_covariance(std::span<const double> data, DyadicIndex tau,
                                   std::size_t start, std::size_t N);

/// d(x_j) = Σ_n X_n W(n, x_j).
std::vector<double> finite_walsh_transform(std::span<const double> data);

/// I(x_j) = d(x_j)² / N.
Periodogram walsh_periodogram(std::span<const double> data);

/// Moving average over 2·half_width+1 bins, mirrored at both ends.
Periodogram smooth_periodogram(const Periodogram& p, std::size_t half_width);

/// One periodogram per segment [start, start+N), start = 0, step, 2·step, ...
/// step == N gives aligned, non-overlapping segments; other steps are heuristic.
std::vector<Periodogram> segmented_local_spectrum(const SamplePath& path, std::size_t N,
                                                  std::size_t step);
std::vector<Periodogram> segmented_local_spectrum(std::span<const double> data, std::size_t N,
                                                  std::size_t step);

/// f(x_j) = Σ_{τ<2^m} R(τ) W(τ, x_j).
std::vector<double> walsh_spectrum_from_cov(const CovarianceSequence& cov, int m);

/// Inverse of walsh_spectrum_from_cov on the same grid.
std::vector<double> covariance_from_spectrum(std::span<const double> spectrum);

}  // namespace walsh
