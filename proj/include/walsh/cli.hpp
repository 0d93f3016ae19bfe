#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "walsh/process.hpp"

namespace walsh::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSingular = 3,
  kVerificationFailed = 4,
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Parses a process-spec JSON document:
/// {kind, ar: [curve...], ma: [curve...], trend, amplitude, sigma, distribution, seed}.
/// Curves may be strings or numbers. Throws InvalidArgument / CurveSyntaxError.
ProcessSpec parse_spec_json(std::string_view text);

/// "figure1", "figure2" or "white".
ProcessSpec preset_spec(std::string_view name);

/// Runs one command line (without the program name). Writes diagnostics to
/// `err` as "error: category=<name>: <message>" and returns the exit code.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace walsh::cli
