#include "walsh/process.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "walsh/errors.hpp"
#include "walsh/parallel.hpp"

namespace walsh {

namespace {

constexpr double kBlockRcondTolerance = 1e-9;

bool is_unit_curve(const CurveExpr& c) { return !c.depends_on_u() && c(0.0) == 1.0; }

bool is_unit(const std::vector<CurveExpr>& curves) {
  return curves.size() == 1 && is_unit_curve(curves.front());
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::uint64_t fingerprint_values(std::span<const double> v) noexcept {
  return fnv1a64(std::as_bytes(v));
}

void check_length(const ProcessSpec& spec, std::size_t T) {
  if (!is_power_of_two(T)) {
    throw InvalidArgument("T = " + std::to_string(T) + " is not a power of two");
  }
  if (T < spec.block_length()) {
    throw InvalidArgument("T = " + std::to_string(T) + " is shorter than the dyadic block length " +
                          std::to_string(spec.block_length()));
  }
}

// Row-major table of curves evaluated at u = t/T, zero-padded to `width`.
std::vector<double> coefficient_table(const std::vector<CurveExpr>& curves, std::size_t width,
                                      std::size_t T, double offset = 0.0) {
  std::vector<double> table(T * width, 0.0);
  parallel_for(
      T,
      [&](std::size_t t) {
        const double u = static_cast<double>(t) / static_cast<double>(T);
        for (std::size_t k = 0; k < curves.size(); ++k) table[t * width + k] = curves[k](u) + offset;
      },
      256);
  return table;
}

// R_t = Σ_n a_n ε_{t⊕n}.
std::vector<double> moving_average(const std::vector<double>& ma_table, std::size_t width,
                                   std::span<const double> eps) {
  const std::size_t T = eps.size();
  std::vector<double> out(T, 0.0);
  parallel_for(
      T,
      [&](std::size_t t) {
        double s = 0.0;
        const double* a = ma_table.data() + t * width;
        for (std::size_t n = 0; n < width; ++n) s += a[n] * eps[t ^ n];
        out[t] = s;
      },
      1024);
  return out;
}

// Solves Σ_k b_k(t) X_{t⊕k} = R_t block by block. Reports the lowest
// singular block regardless of execution order.
std::vector<double> solve_blocks(const std::vector<double>& ar_table, std::size_t L,
                                 std::span<const double> rhs) {
  const std::size_t T = rhs.size();
  std::vector<double> x(T, 0.0);
  const std::size_t blocks = T / L;
  std::vector<double> failed_rcond(blocks, -1.0);

  parallel_for(
      blocks,
      [&](std::size_t blk) {
        const std::size_t base = blk * L;
        const double* row0 = ar_table.data() + base * L;

        if (L == 1) {
          if (row0[0] == 0.0) {
            failed_rcond[blk] = 0.0;
            return;
          }
          x[base] = rhs[base] / row0[0];
          return;
        }

        bool constant = true;
        for (std::size_t i = 1; i < L && constant; ++i) {
          constant = std::equal(row0, row0 + L, ar_table.data() + (base + i) * L);
        }

        if (constant) {
          // XOR-circulant block: diagonal in the Walsh basis.
          std::vector<double> phi(row0, row0 + L);
          fwht_inplace(phi);
          double max_abs = 0.0;
          double min_abs = std::numeric_limits<double>::infinity();
          for (double v : phi) {
            max_abs = std::max(max_abs, std::abs(v));
            min_abs = std::min(min_abs, std::abs(v));
          }
          const double rcond = max_abs > 0.0 ? min_abs / max_abs : 0.0;
          if (!(rcond > kBlockRcondTolerance)) {
            failed_rcond[blk] = rcond;
            return;
          }
          std::vector<double> r(rhs.begin() + static_cast<std::ptrdiff_t>(base),
                                rhs.begin() + static_cast<std::ptrdiff_t>(base + L));
          fwht_inplace(r);
          for (std::size_t j = 0; j < L; ++j) r[j] /= phi[j];
          fwht_inplace(r);
          const double scale = 1.0 / static_cast<double>(L);
          for (std::size_t j = 0; j < L; ++j) x[base + j] = r[j] * scale;
          return;
        }

        Eigen::MatrixXd m(L, L);
        Eigen::VectorXd r(L);
        for (std::size_t i = 0; i < L; ++i) {
          const double* row = ar_table.data() + (base + i) * L;
          for (std::size_t j = 0; j < L; ++j) m(i, j) = row[i ^ j];
          r(i) = rhs[base + i];
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        const double rcond = lu.rcond();
        if (!(rcond > kBlockRcondTolerance)) {
          failed_rcond[blk] = rcond;
          return;
        }
        const Eigen::VectorXd sol = lu.solve(r);
        for (std::size_t i = 0; i < L; ++i) x[base + i] = sol(i);
      },
      16);

  for (std::size_t blk = 0; blk < blocks; ++blk) {
    if (failed_rcond[blk] >= 0.0) {
      throw SingularBlock("block " + std::to_string(blk) + " (t = " + std::to_string(blk * L) +
                              ".." + std::to_string(blk * L + L - 1) + ") is singular, rcond " +
                              shortest(failed_rcond[blk]),
                          blk, failed_rcond[blk]);
    }
  }
  return x;
}

SamplePath make_path(const ProcessSpec& spec, std::size_t T, std::vector<double> values,
                     std::vector<double> eps) {
  SamplePath path;
  path.T = T;
  path.values = std::move(values);
  path.innovations = std::move(eps);
  path.spec_fingerprint = fingerprint(spec);
  path.innovations_fingerprint = fingerprint_values(path.innovations);
  return path;
}

void add_trend(const CurveExpr& trend, std::vector<double>& x) {
  const std::size_t T = x.size();
  for (std::size_t t = 0; t < T; ++t) {
    x[t] += trend(static_cast<double>(t) / static_cast<double>(T));
  }
}

std::vector<double> darma_values(const std::vector<CurveExpr>& ar, const std::vector<CurveExpr>& ma,
                                 std::size_t T, std::span<const double> eps, double slack) {
  const std::size_t la = next_power_of_two(ar.size());
  const std::size_t lm = next_power_of_two(ma.size());
  const auto ma_table = coefficient_table(ma, lm, T, slack / static_cast<double>(T));
  std::vector<double> rhs = moving_average(ma_table, lm, eps);
  if (is_unit(ar)) return rhs;
  return solve_blocks(coefficient_table(ar, la, T), la, rhs);
}

}  // namespace

std::string_view to_string(ProcessKind kind) noexcept {
  switch (kind) {
    case ProcessKind::tvdma:
      return "tvDMA";
    case ProcessKind::tvdar:
      return "tvDAR";
    case ProcessKind::tvdarma:
      return "tvDARMA";
    case ProcessKind::modulated:
      return "modulated";
  }
  return "tvDMA";
}

ProcessKind parse_process_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "tvdma") return ProcessKind::tvdma;
  if (lower == "tvdar") return ProcessKind::tvdar;
  if (lower == "tvdarma") return ProcessKind::tvdarma;
  if (lower == "modulated") return ProcessKind::modulated;
  throw InvalidArgument("unknown process kind '" + std::string(name) + "'");
}

void validate(const ProcessSpec& spec) {
  if (spec.ar.empty() || spec.ma.empty()) {
    throw InvalidArgument("AR and MA curve lists must be non-empty");
  }
  if (spec.ar.size() > (std::size_t{1} << 16) || spec.ma.size() > (std::size_t{1} << 16)) {
    throw InvalidArgument("process order exceeds 2^16 coefficients");
  }
  if (!(spec.innovations.sigma > 0.0) || !std::isfinite(spec.innovations.sigma)) {
    throw InvalidArgument("innovation sigma must be positive and finite");
  }
  switch (spec.kind) {
    case ProcessKind::tvdma:
      if (!is_unit(spec.ar)) throw InvalidArgument("a tvDMA spec must not carry AR curves");
      break;
    case ProcessKind::tvdar:
      if (!is_unit(spec.ma)) throw InvalidArgument("a tvDAR spec must not carry MA curves");
      break;
    case ProcessKind::tvdarma:
      break;
    case ProcessKind::modulated: {
      auto varies = [](const CurveExpr& c) { return c.depends_on_u(); };
      if (std::any_of(spec.ar.begin(), spec.ar.end(), varies) ||
          std::any_of(spec.ma.begin(), spec.ma.end(), varies)) {
        throw InvalidArgument("a modulated spec needs constant AR/MA curves");
      }
      break;
    }
  }
}

std::vector<std::string> spec_warnings(const ProcessSpec& spec) {
  std::vector<std::string> out;
  auto check = [&](const std::vector<CurveExpr>& curves, const char* name) {
    if (curves.size() <= 1) return;
    const std::size_t len = next_power_of_two(curves.size());
    for (double u : {0.0, 0.5, 1.0}) {
      std::vector<double> c(len, 0.0);
      for (std::size_t k = 0; k < curves.size(); ++k) c[k] = curves[k](u);
      if (!has_top_half_coefficient(WalshPolynomial(c))) {
        out.push_back(std::string(name) + " polynomial has no nonzero coefficient in [" +
                      std::to_string(len / 2) + ", " + std::to_string(len) + ") at u = " +
                      shortest(u) + "; its dyadic order is lower than its length suggests");
        return;
      }
    }
  };
  check(spec.ar, "AR");
  check(spec.ma, "MA");
  return out;
}

std::string canonical_text(const ProcessSpec& spec) {
  std::string s = "kind=" + std::string(to_string(spec.kind)) + ";ar=[";
  for (std::size_t k = 0; k < spec.ar.size(); ++k) s += (k ? "," : "") + spec.ar[k].to_string();
  s += "];ma=[";
  for (std::size_t k = 0; k < spec.ma.size(); ++k) s += (k ? "," : "") + spec.ma[k].to_string();
  s += "];trend=" + spec.trend.to_string();
  s += ";amplitude=" + spec.amplitude.to_string();
  s += ";distribution=" + std::string(to_string(spec.innovations.distribution));
  s += ";sigma=" + shortest(spec.innovations.sigma);
  s += ";seed=" + std::to_string(spec.innovations.seed);
  return s;
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fingerprint(const ProcessSpec& spec) {
  const std::string text = canonical_text(spec);
  return fnv1a64(std::as_bytes(std::span(text.data(), text.size())));
}

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + 16, v, 16);
  std::string s(buf.data(), ptr);
  return std::string(16 - s.size(), '0') + s;
}

SamplePath simulate(const ProcessSpec& spec, std::size_t T, const SimulationOptions& options) {
  validate(spec);
  check_length(spec, T);
  return simulate_with_innovations(spec, T, make_innovations(spec.innovations, T), options);
}

SamplePath simulate_with_innovations(const ProcessSpec& spec, std::size_t T,
                                     std::vector<double> innovations,
                                     const SimulationOptions& options) {
  validate(spec);
  check_length(spec, T);
  if (innovations.size() != T) {
    throw InvalidArgument("expected " + std::to_string(T) + " innovations, got " +
                          std::to_string(innovations.size()));
  }

  std::vector<double> x;
  if (spec.kind == ProcessKind::modulated) {
    std::vector<CurveExpr> ar;
    std::vector<CurveExpr> ma;
    for (const auto& c : spec.ar) ar.push_back(CurveExpr::constant(c(0.0)));
    for (const auto& c : spec.ma) ma.push_back(CurveExpr::constant(c(0.0)));
    x = darma_values(ar, ma, T, innovations, options.coefficient_slack);
    for (std::size_t t = 0; t < T; ++t) {
      x[t] *= spec.amplitude(static_cast<double>(t) / static_cast<double>(T));
    }
  } else {
    x = darma_values(spec.ar, spec.ma, T, innovations, options.coefficient_slack);
  }
  add_trend(spec.trend, x);
  return make_path(spec, T, std::move(x), std::move(innovations));
}

SamplePath simulate_tvdma(const ProcessSpec& spec, std::size_t T, const SimulationOptions& options) {
  if (spec.kind != ProcessKind::tvdma) throw InvalidArgument("simulate_tvdma needs a tvDMA spec");
  return simulate(spec, T, options);
}

SamplePath simulate_tvdarma(const ProcessSpec& spec, std::size_t T,
                            const SimulationOptions& options) {
  if (spec.kind == ProcessKind::modulated) {
    throw InvalidArgument("simulate_tvdarma does not accept a modulated spec");
  }
  return simulate(spec, T, options);
}

ProcessSpec frozen_spec(const ProcessSpec& spec, double u0) {
  ProcessSpec out = spec;
  auto freeze = [u0](const CurveExpr& c) { return CurveExpr::constant(c(u0)); };
  std::transform(spec.ar.begin(), spec.ar.end(), out.ar.begin(), freeze);
  std::transform(spec.ma.begin(), spec.ma.end(), out.ma.begin(), freeze);
  out.trend = freeze(spec.trend);
  out.amplitude = freeze(spec.amplitude);
  return out;
}

SamplePath simulate_frozen(const ProcessSpec& spec, double u0, std::size_t T) {
  return simulate(frozen_spec(spec, u0), T);
}

std::pair<WalshPolynomial, WalshPolynomial> convert_spec_frozen(const ProcessSpec& spec, double u) {
  std::vector<double> ar(spec.ar_length(), 0.0);
  std::vector<double> ma(spec.ma_length(), 0.0);
  for (std::size_t k = 0; k < spec.ar.size(); ++k) ar[k] = spec.ar[k](u);
  for (std::size_t k = 0; k < spec.ma.size(); ++k) ma[k] = spec.ma[k](u);
  if (spec.kind == ProcessKind::modulated) {
    const double s = spec.amplitude(u);
    for (double& v : ma) v *= s;
  }
  return {WalshPolynomial(std::move(ar)), WalshPolynomial(std::move(ma))};
}

WalshPolynomial frozen_dma_coefficients(const ProcessSpec& spec, double u) {
  const auto [ar, ma] = convert_spec_frozen(spec, u);
  try {
    return darma_to_dma(ar, ma);
  } catch (const SingularPolynomial& e) {
    throw SingularPolynomial("AR polynomial is singular at u = " + shortest(u) + ": " + e.what(),
                             e.grid_index(), e.min_abs_value(), u);
  }
}

SamplePath simulate_converted_dma(const ProcessSpec& spec, std::size_t T) {
  validate(spec);
  check_length(spec, T);
  std::vector<double> eps = make_innovations(spec.innovations, T);
  const std::size_t width = spec.block_length();
  std::vector<double> table(T * width, 0.0);
  parallel_for(
      T,
      [&](std::size_t t) {
        const auto k = frozen_dma_coefficients(spec, static_cast<double>(t) / static_cast<double>(T));
        std::copy(k.coefficients().begin(), k.coefficients().end(), table.begin() + t * width);
      },
      256);
  std::vector<double> x = moving_average(table, width, eps);
  add_trend(spec.trend, x);
  return make_path(spec, T, std::move(x), std::move(eps));
}

double approx_error(const SamplePath& tv, const SamplePath& frozen, std::size_t center,
                    std::size_t radius) {
  if (tv.T != frozen.T || tv.values.size() != frozen.values.size()) {
    throw InvalidArgument("approx_error: paths have different lengths");
  }
  if (tv.innovations_fingerprint != frozen.innovations_fingerprint) {
    throw InvalidArgument("approx_error: paths were driven by different innovations");
  }
  if (center >= tv.T) throw InvalidArgument("approx_error: center outside the path");
  const std::size_t lo = center >= radius ? center - radius : 0;
  const std::size_t hi = std::min(tv.T - 1, center + radius);
  double err = 0.0;
  for (std::size_t t = lo; t <= hi; ++t) err = std::max(err, std::abs(tv.values[t] - frozen.values[t]));
  return err;
}

double fit_loglog_slope(std::span<const std::size_t> T_values, std::span<const double> errors) {
  if (T_values.size() != errors.size() || T_values.size() < 2) {
    throw InvalidArgument("slope fit needs at least two (T, error) pairs");
  }
  const std::size_t n = T_values.size();
  double mx = 0.0;
  double my = 0.0;
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0)) throw InvalidArgument("slope fit needs positive errors");
    xs[i] = std::log2(static_cast<double>(T_values[i]));
    ys[i] = std::log2(errors[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit needs distinct T values");
  return sxy / sxx;
}

ApproxReport approximation_decay(const ProcessSpec& spec, ApproxMode mode,
                                 std::span<const std::size_t> T_values, double u0,
                                 std::size_t radius, std::size_t replicates,
                                 const SimulationOptions& options) {
  if (replicates < 1) throw InvalidArgument("replicate count must be >= 1");
  if (T_values.empty()) throw InvalidArgument("at least one T is required");
  if (!(u0 >= 0.0 && u0 <= 1.0)) throw InvalidArgument("u0 must lie in [0, 1]");
  validate(spec);

  ApproxReport report;
  report.mode = mode;
  report.u0 = u0;
  report.radius = radius;
  report.replicates = replicates;
  report.T_values.assign(T_values.begin(), T_values.end());

  for (std::size_t T : T_values) {
    check_length(spec, T);
    const auto center =
        std::min(T - 1, static_cast<std::size_t>(std::floor(u0 * static_cast<double>(T))));
    std::vector<double> errs(replicates, 0.0);
    parallel_for(replicates, [&](std::size_t r) {
      ProcessSpec rep = spec;
      rep.innovations.seed = derive_seed(spec.innovations.seed, r);
      const SamplePath tv = simulate(rep, T, options);
      const SamplePath other =
          mode == ApproxMode::frozen ? simulate_frozen(rep, u0, T) : simulate_converted_dma(rep, T);
      errs[r] = approx_error(tv, other, center, radius);
    });
    // Fixed summation order keeps the mean reproducible.
    report.sup_errors.push_back(std::accumulate(errs.begin(), errs.end(), 0.0) /
                                static_cast<double>(replicates));
  }

  report.exact = std::all_of(report.sup_errors.begin(), report.sup_errors.end(),
                             [](double e) { return e <= ApproxReport::kExactTolerance; });
  if (!report.exact && report.T_values.size() >= 2) {
    report.slope = fit_loglog_slope(report.T_values, report.sup_errors);
  }
  return report;
}

}  // namespace walsh
