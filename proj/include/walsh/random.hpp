#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, index), so any subset of indices can be generated in any order or
// in parallel and reproduce the serial result bit for bit.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace walsh {

enum class Distribution { gaussian, rademacher, uniform };

std::string_view to_string(Distribution d) noexcept;
/// Throws InvalidArgument for unknown names.
Distribution parse_distribution(std::string_view name);

/// i.i.d. innovations with mean 0 and variance sigma².
struct InnovationSpec {
  Distribution distribution = Distribution::gaussian;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent 64-bit word for (seed, counter).
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) noexcept {
  return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ (counter * 0xd1b54a32d192ed03ULL + 1));
}

/// Seed of sub-stream `stream` (replicate, block, ...) of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return counter_hash(master ^ 0x5851f42d4c957f2dULL, stream);
}

/// ε_t for a single index t.
double innovation_at(const InnovationSpec& spec, std::uint64_t t);

/// ε_0 … ε_{T-1}. Throws InvalidArgument for T < 1 or sigma <= 0.
std::vector<double> make_innovations(const InnovationSpec& spec, std::size_t T);

}  // namespace walsh
