#pragma once

// Simulation of dyadic-stationary and locally dyadic-stationary processes on
// t = 0..T-1 (u = t/T), T a power of two:
//
//   tvDMA      X_t = μ(u) + Σ_n a_n(u) ε_{t⊕n}
//   tvDARMA    Σ_k b_k(u) X_{t⊕k} = Σ_n a_n(u) ε_{t⊕n}   (then + μ(u))
//   tvDAR      tvDARMA with a = e₀
//   modulated  X_t = μ(u) + σ(u)·Y_t, Y a stationary DARMA

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "walsh/curve.hpp"
#include "walsh/random.hpp"
#include "walsh/walsh_poly.hpp"

namespace walsh {

enum class ProcessKind { tvdma, tvdar, tvdarma, modulated };

std::string_view to_string(ProcessKind kind) noexcept;
/// Accepts "tvDMA", "tvDAR", "tvDARMA", "modulated" (case-insensitive).
ProcessKind parse_process_kind(std::string_view name);

struct ProcessSpec {
  ProcessKind kind = ProcessKind::tvdma;
  /// b_0(u) … b_p(u); zero-padded to a power of two.
  std::vector<CurveExpr> ar{CurveExpr::constant(1.0)};
  /// a_0(u) … a_r(u); zero-padded to a power of two.
  std::vector<CurveExpr> ma{CurveExpr::constant(1.0)};
  CurveExpr trend;
  /// σ(u) of the modulated process; ignored by the other kinds.
  CurveExpr amplitude = CurveExpr::constant(1.0);
  InnovationSpec innovations;

  std::size_t ar_length() const noexcept { return next_power_of_two(ar.size()); }
  std::size_t ma_length() const noexcept { return next_power_of_two(ma.size()); }
  /// 2^{max(m, f)}: smallest admissible T.
  std::size_t block_length() const noexcept { return std::max(ar_length(), ma_length()); }
};

/// Throws InvalidArgument when the process is structurally inconsistent with its kind.
void validate(const ProcessSpec& spec);

/// Non-fatal remarks, e.g. AR/MA orders without a nonzero top-half coefficient.
std::vector<std::string> spec_warnings(const ProcessSpec& spec);

/// Stable text form of every field; the basis of fingerprint().
std::string canonical_text(const ProcessSpec& spec);

std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept;
std::uint64_t fingerprint(const ProcessSpec& spec);
std::string hex64(std::uint64_t v);

struct SamplePath {
  std::size_t T = 0;
  std::vector<double> values;
  std::vector<double> innovations;
  std::uint64_t spec_fingerprint = 0;
  std::uint64_t innovations_fingerprint = 0;

  double u(std::size_t t) const noexcept { return static_cast<double>(t) / static_cast<double>(T); }
};

struct SimulationOptions {
  /// K of a_{n,t,T} = a_n(t/T) + K/T, added to every MA coefficient.
  double coefficient_slack = 0.0;
};

/// Dispatches on spec.kind; innovations come from spec.innovations.
SamplePath simulate(const ProcessSpec& spec, std::size_t T, const SimulationOptions& options = {});

/// Same as simulate() with caller-supplied ε_0 … ε_{T-1}.
SamplePath simulate_with_innovations(const ProcessSpec& spec, std::size_t T,
                                     std::vector<double> innovations,
                                     const SimulationOptions& options = {});

/// Requires kind tvDMA.
SamplePath simulate_tvdma(const ProcessSpec& spec, std::size_t T,
                          const SimulationOptions& options = {});

/// Block solve of the defining equation; requires kind tvDMA, tvDAR or tvDARMA.
/// Throws SingularBlock when a block system is (numerically) singular.
SamplePath simulate_tvdarma(const ProcessSpec& spec, std::size_t T,
                            const SimulationOptions& options = {});

/// A copy of `spec` with every curve replaced by its value at u0.
ProcessSpec frozen_spec(const ProcessSpec& spec, double u0);

/// X̃_t(u0): stationary coefficients, same innovations as simulate(spec, T).
SamplePath simulate_frozen(const ProcessSpec& spec, double u0, std::size_t T);

/// (AR, MA) polynomials with curves evaluated at u. For the modulated kind
/// the MA polynomial carries the factor σ(u).
std::pair<WalshPolynomial, WalshPolynomial> convert_spec_frozen(const ProcessSpec& spec, double u);

/// K(u) = darma_to_dma at frozen u; SingularPolynomial reports u.
WalshPolynomial frozen_dma_coefficients(const ProcessSpec& spec, double u);

/// tvDMA(μ) comparison process X_t = μ(u) + Σ_j K_j(u) ε_{t⊕j}, sharing the innovations of simulate().
SamplePath simulate_converted_dma(const ProcessSpec& spec, std::size_t T);

/// max_{|t-center| <= radius} |tv_t - frozen_t|; the window is clipped to [0, T).
double approx_error(const SamplePath& tv, const SamplePath& frozen, std::size_t center,
                    std::size_t radius);

enum class ApproxMode { frozen, conversion };

struct ApproxReport {
  ApproxMode mode = ApproxMode::frozen;
  double u0 = 0.5;
  std::size_t radius = 16;
  std::size_t replicates = 1;
  std::vector<std::size_t> T_values;
  /// Replicate mean of the windowed sup-error, per T.
  std::vector<double> sup_errors;
  /// Least-squares slope of log2(sup_error) on log2(T); 0 when exact.
  double slope = 0.0;
  /// Every error <= kExactTolerance.
  bool exact = false;

  static constexpr double kExactTolerance = 1e-12;
};

/// Paired-innovation decay experiment. Replicate r uses seed derive_seed(seed, r).
ApproxReport approximation_decay(const ProcessSpec& spec, ApproxMode mode,
                                 std::span<const std::size_t> T_values, double u0,
                                 std::size_t radius, std::size_t replicates,
                                 const SimulationOptions& options = {});

double fit_loglog_slope(std::span<const std::size_t> T_values, std::span<const double> errors);

}  // namespace walsh
