#include "walsh/random.hpp"

#include <cmath>
#include <numbers>

#include "walsh/errors.hpp"
#include "walsh/parallel.hpp"

namespace walsh {

namespace {

// Uniform on (0, 1), never exactly 0 or 1.
double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(Distribution d) noexcept {
  switch (d) {
    case Distribution::gaussian:
      return "gaussian";
    case Distribution::rademacher:
      return "rademacher";
    case Distribution::uniform:
      return "uniform";
  }
  return "gaussian";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "gaussian" || name == "normal") return Distribution::gaussian;
  if (name == "rademacher") return Distribution::rademacher;
  if (name == "uniform") return Distribution::uniform;
  throw InvalidArgument("unknown innovation distribution '" + std::string(name) + "'");
}

double innovation_at(const InnovationSpec& spec, std::uint64_t t) {
  switch (spec.distribution) {
    case Distribution::gaussian: {
      // Box-Muller, cosine branch only so that each index owns two words.
      const double u1 = open_unit(counter_hash(spec.seed, 2 * t));
      const double u2 = open_unit(counter_hash(spec.seed, 2 * t + 1));
      return spec.sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case Distribution::rademacher:
      return (counter_hash(spec.seed, t) >> 63) ? -spec.sigma : spec.sigma;
    case Distribution::uniform:
      return spec.sigma * std::numbers::sqrt3 * (2.0 * open_unit(counter_hash(spec.seed, t)) - 1.0);
  }
  return 0.0;
}

std::vector<double> make_innovations(const InnovationSpec& spec, std::size_t T) {
  if (T < 1) throw InvalidArgument("innovation count must be >= 1");
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) {
    throw InvalidArgument("innovation sigma must be positive and finite");
  }
  std::vector<double> eps(T);
  parallel_for(T, [&](std::size_t t) { eps[t] = innovation_at(spec, t); }, 4096);
  return eps;
}

}  // namespace walsh
