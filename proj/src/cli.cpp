#include "walsh/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "walsh/errors.hpp"
#include "walsh/parallel.hpp"
#include "walsh/spectra.hpp"

namespace walsh::cli {

namespace {

using json = nlohmann::json;

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct Config {
  std::string command;
  std::string spec_path;
  std::string preset;
  std::size_t T = 4096;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t u_points = 65;
  int m = 6;
  std::size_t segment_length = 0;
  std::size_t step = 0;
  std::size_t smooth = 0;
  std::size_t replicates = 0;
  std::string mode = "frozen";
  std::size_t radius = 16;
  std::string target = "dma";
  std::string input;
  std::size_t lambda_points = 0;
  std::string fourier_out;
  std::vector<std::size_t> Ts;
  double u0 = 0.5;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string provenance_line(std::string_view fingerprint_hex) {
  return "# walsh-spectra " + std::string(kVersion) + " spec=" + std::string(fingerprint_hex) + "\n";
}

CurveExpr curve_from_json(const json& j, const char* field) {
  if (j.is_string()) return CurveExpr::parse(j.get<std::string>());
  if (j.is_number()) return CurveExpr::constant(j.get<double>());
  throw InvalidArgument(std::string("field '") + field + "' must hold curve strings or numbers");
}

std::vector<CurveExpr> curve_list(const json& j, const char* field) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgument(std::string("field '") + field + "' must be a non-empty array");
  }
  std::vector<CurveExpr> curves;
  for (const auto& item : j) curves.push_back(curve_from_json(item, field));
  return curves;
}

std::vector<double> u_grid(std::size_t points) {
  std::vector<double> u(points, 0.0);
  if (points == 1) return u;
  for (std::size_t i = 0; i < points; ++i) {
    u[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return u;
}

std::vector<double> lambda_grid(std::size_t points) {
  std::vector<double> l(points, 0.0);
  if (points == 1) return l;
  for (std::size_t i = 0; i < points; ++i) {
    l[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return l;
}

ProcessSpec load_spec(const Config& cfg) {
  if (!cfg.spec_path.empty() && !cfg.preset.empty()) {
    throw InvalidArgument("--spec and --preset are mutually exclusive");
  }
  if (cfg.spec_path.empty() && cfg.preset.empty()) {
    throw InvalidArgument("command '" + cfg.command + "' needs --spec FILE or --preset NAME");
  }
  ProcessSpec spec =
      cfg.preset.empty() ? parse_spec_json(read_file(cfg.spec_path)) : preset_spec(cfg.preset);
  if (cfg.seed) spec.innovations.seed = *cfg.seed;
  validate(spec);
  return spec;
}

void report_warnings(const ProcessSpec& spec, std::ostream& err) {
  for (const auto& w : spec_warnings(spec)) err << "warning: " << w << "\n";
}

std::string spectral_csv(const SpectralGrid& grid, std::string_view fp, const char* x_name,
                         const char* value_name) {
  std::string s = provenance_line(fp);
  s += std::string("u,") + x_name + "," + value_name + "\n";
  for (std::size_t i = 0; i < grid.u_values.size(); ++i) {
    const std::string u = format_double(grid.u_values[i]);
    for (std::size_t j = 0; j < grid.x_values.size(); ++j) {
      s += u;
      s += ',';
      s += format_double(grid.x_values[j]);
      s += ',';
      s += format_double(grid.at(i, j));
      s += '\n';
    }
  }
  return s;
}

void check_grid_config(const Config& cfg) {
  if (cfg.u_points < 1 || cfg.u_points > (std::size_t{1} << 16)) {
    throw InvalidArgument("--u-points must be in [1, 65536]");
  }
  if (cfg.m < 0 || cfg.m > kMaxGridExponent) {
    throw InvalidArgument("--m must be in [0, " + std::to_string(kMaxGridExponent) + "]");
  }
  if (cfg.lambda_points > (std::size_t{1} << 16)) {
    throw InvalidArgument("--lambda-points must be at most 65536");
  }
}

int cmd_simulate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const ProcessSpec spec = load_spec(cfg);
  report_warnings(spec, err);
  const SamplePath path = simulate(spec, cfg.T);
  const std::string fp = hex64(path.spec_fingerprint);

  std::string s = provenance_line(fp);
  s += "t,u,x_value\n";
  for (std::size_t t = 0; t < path.T; ++t) {
    s += std::to_string(t);
    s += ',';
    s += format_double(path.u(t));
    s += ',';
    s += format_double(path.values[t]);
    s += '\n';
  }
  write_output(cfg.out, s, out);

  if (!cfg.out.empty() && cfg.out != "-") {
    json side;
    side["tool"] = "walsh-spectra";
    side["version"] = std::string(kVersion);
    side["spec_fingerprint"] = fp;
    side["innovations_fingerprint"] = hex64(path.innovations_fingerprint);
    side["seed"] = spec.innovations.seed;
    side["T"] = path.T;
    side["kind"] = std::string(to_string(spec.kind));
    side["spec"] = canonical_text(spec);
    side["warnings"] = spec_warnings(spec);
    write_output(cfg.out + ".json", side.dump(2) + "\n", out);
  }
  return kOk;
}

int cmd_spectrum(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_grid_config(cfg);
  const ProcessSpec spec = load_spec(cfg);
  report_warnings(spec, err);
  const std::string fp = hex64(fingerprint(spec));
  const auto us = u_grid(cfg.u_points);

  const SpectralGrid g = tv_dyadic_density(spec, us, cfg.m);
  write_output(cfg.out, spectral_csv(g, fp, "x", "g"), out);

  if (cfg.lambda_points > 0) {
    const SpectralGrid f = tv_fourier_density(spec, us, lambda_grid(cfg.lambda_points));
    std::string target = cfg.fourier_out;
    if (target.empty() && !cfg.out.empty() && cfg.out != "-") target = cfg.out + ".fourier.csv";
    write_output(target, spectral_csv(f, fp, "lambda", "f"), out);
  }
  return kOk;
}

int cmd_convert(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_grid_config(cfg);
  if (cfg.target != "dma" && cfg.target != "dar") {
    throw InvalidArgument("--target must be 'dma' or 'dar'");
  }
  const ProcessSpec spec = load_spec(cfg);
  report_warnings(spec, err);
  const std::string fp = hex64(fingerprint(spec));

  std::string s = provenance_line(fp);
  s += "u,j,K_j\n";
  for (double u : u_grid(cfg.u_points)) {
    const auto [ar, ma] = convert_spec_frozen(spec, u);
    WalshPolynomial k;
    try {
      k = cfg.target == "dma" ? darma_to_dma(ar, ma) : darma_to_dar(ar, ma);
    } catch (const SingularPolynomial& e) {
      throw SingularPolynomial(std::string(e.what()) + " at u = " + format_double(u),
                               e.grid_index(), e.min_abs_value(), u);
    }
    const std::string us = format_double(u);
    for (std::size_t j = 0; j < k.size(); ++j) {
      s += us;
      s += ',';
      s += std::to_string(j);
      s += ',';
      s += format_double(k[j]);
      s += '\n';
    }
  }
  write_output(cfg.out, s, out);
  return kOk;
}

int cmd_verify(const Config& cfg, std::ostream& out, std::ostream& err) {
  ApproxMode mode;
  if (cfg.mode == "frozen") {
    mode = ApproxMode::frozen;
  } else if (cfg.mode == "conversion") {
    mode = ApproxMode::conversion;
  } else {
    throw InvalidArgument("--mode must be 'frozen' or 'conversion'");
  }
  const ProcessSpec spec = load_spec(cfg);
  report_warnings(spec, err);
  std::vector<std::size_t> Ts = cfg.Ts;
  if (Ts.empty()) {
    for (std::size_t T = 128; T <= 8192; T *= 2) Ts.push_back(T);
  }
  const std::size_t replicates = cfg.replicates == 0 ? 20 : cfg.replicates;

  const ApproxReport r = approximation_decay(spec, mode, Ts, cfg.u0, cfg.radius, replicates);
  constexpr double lo = -1.4;
  constexpr double hi = -0.6;
  const bool passed = r.exact || (r.slope >= lo && r.slope <= hi);

  json rep;
  rep["tool"] = "walsh-spectra";
  rep["version"] = std::string(kVersion);
  rep["spec_fingerprint"] = hex64(fingerprint(spec));
  rep["mode"] = cfg.mode;
  rep["u0"] = r.u0;
  rep["radius"] = r.radius;
  rep["replicates"] = r.replicates;
  rep["T_values"] = r.T_values;
  rep["sup_errors"] = r.sup_errors;
  rep["exact"] = r.exact;
  rep["slope"] = r.slope;
  rep["slope_range"] = {lo, hi};
  rep["passed"] = passed;
  write_output(cfg.out, rep.dump(2) + "\n", out);

  if (!passed) {
    throw VerificationFailure("log-log slope " + format_double(r.slope) + " outside [" +
                              format_double(lo) + ", " + format_double(hi) + "]");
  }
  return kOk;
}

struct InputSeries {
  std::vector<double> values;
  std::string fingerprint = "none";
};

InputSeries read_path_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  InputSeries series;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("spec=");
      if (pos != std::string::npos) series.fingerprint = line.substr(pos + 5);
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line != "t,u,x_value") {
        throw InvalidArgument("'" + path + "' does not start with header t,u,x_value");
      }
      continue;
    }
    const auto comma = line.rfind(',');
    const char* first = line.data() + (comma == std::string::npos ? 0 : comma + 1);
    const char* last = line.data() + line.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw InvalidArgument("'" + path + "' line " + std::to_string(line_no) +
                            ": cannot parse value");
    }
    series.values.push_back(v);
  }
  if (series.values.empty()) throw InvalidArgument("'" + path + "' holds no observations");
  return series;
}

void accumulate(std::vector<Periodogram>& total, const std::vector<Periodogram>& part) {
  if (total.empty()) {
    total = part;
    return;
  }
  for (std::size_t s = 0; s < total.size(); ++s) {
    for (std::size_t j = 0; j < total[s].I_values.size(); ++j) {
      total[s].I_values[j] += part[s].I_values[j];
    }
  }
}

int cmd_periodogram(const Config& cfg, std::ostream& out, std::ostream& err) {
  const std::size_t replicates = cfg.replicates == 0 ? 1 : cfg.replicates;
  std::vector<Periodogram> total;
  std::string fp;

  auto segment_length = [&](std::size_t T) {
    return cfg.segment_length == 0 ? std::min<std::size_t>(T, 512) : cfg.segment_length;
  };

  if (!cfg.input.empty()) {
    if (!cfg.spec_path.empty() || !cfg.preset.empty()) {
      throw InvalidArgument("--input cannot be combined with --spec or --preset");
    }
    if (replicates != 1) throw InvalidArgument("--replicates needs a spec, not --input");
    const InputSeries series = read_path_csv(cfg.input);
    fp = series.fingerprint;
    const std::size_t N = segment_length(series.values.size());
    total = segmented_local_spectrum(series.values, N, cfg.step == 0 ? N : cfg.step);
  } else {
    const ProcessSpec spec = load_spec(cfg);
    report_warnings(spec, err);
    fp = hex64(fingerprint(spec));
    const std::size_t N = segment_length(cfg.T);
    const std::size_t step = cfg.step == 0 ? N : cfg.step;
    // Validates N and step before any simulation work.
    segmented_local_spectrum(std::vector<double>(cfg.T, 0.0), N, step);

    const std::size_t batch = 4 * worker_count();
    for (std::size_t first = 0; first < replicates; first += batch) {
      const std::size_t count = std::min(batch, replicates - first);
      std::vector<std::vector<Periodogram>> parts(count);
      parallel_for(count, [&](std::size_t i) {
        const std::size_t r = first + i;
        ProcessSpec rep = spec;
        if (replicates > 1) rep.innovations.seed = derive_seed(spec.innovations.seed, r);
        parts[i] = segmented_local_spectrum(simulate(rep, cfg.T), N, step);
      });
      for (const auto& p : parts) accumulate(total, p);
    }
    const double inv = 1.0 / static_cast<double>(replicates);
    for (auto& p : total) {
      for (double& v : p.I_values) v *= inv;
    }
  }

  std::string s = provenance_line(fp);
  s += "segment_u0,x,I\n";
  for (const auto& raw : total) {
    const Periodogram p = smooth_periodogram(raw, cfg.smooth);
    const std::string u0 = format_double(p.u0);
    for (std::size_t j = 0; j < p.I_values.size(); ++j) {
      s += u0;
      s += ',';
      s += format_double(p.x_values[j]);
      s += ',';
      s += format_double(p.I_values[j]);
      s += '\n';
    }
  }
  write_output(cfg.out, s, out);
  return kOk;
}

int cmd_figures(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_grid_config(cfg);
  if (cfg.out.empty() || cfg.out == "-") throw InvalidArgument("figures needs --out DIRECTORY");
  if (!cfg.spec_path.empty() || !cfg.preset.empty()) {
    throw InvalidArgument("figures uses the built-in presets; drop --spec/--preset");
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw IoError("cannot create directory '" + cfg.out + "': " + ec.message());

  const auto us = u_grid(cfg.u_points);
  const auto lambdas = lambda_grid(cfg.lambda_points == 0 ? 65 : cfg.lambda_points);
  for (const char* name : {"figure1", "figure2"}) {
    const ProcessSpec spec = preset_spec(name);
    report_warnings(spec, err);
    const std::string fp = hex64(fingerprint(spec));
    const std::filesystem::path dir(cfg.out);
    write_output((dir / (std::string(name) + "_dyadic.csv")).string(),
                 spectral_csv(tv_dyadic_density(spec, us, cfg.m), fp, "x", "g"), out);
    write_output((dir / (std::string(name) + "_fourier.csv")).string(),
                 spectral_csv(tv_fourier_density(spec, us, lambdas), fp, "lambda", "f"), out);
  }
  return kOk;
}

void print_error(std::ostream& err, std::string_view category, std::string_view message) {
  err << "error: category=" << category << ": " << message << "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

ProcessSpec parse_spec_json(std::string_view text) {
  const json doc = json::parse(text);
  if (!doc.is_object()) throw InvalidArgument("process spec must be a JSON object");
  static const std::vector<std::string> known = {"kind",  "ar",           "ma",  "trend",
                                                 "amplitude", "sigma", "distribution", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("unknown spec field '" + key + "'");
    }
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw InvalidArgument("spec field 'kind' (string) is required");
  }

  ProcessSpec spec;
  spec.kind = parse_process_kind(doc["kind"].get<std::string>());
  if (doc.contains("ar")) spec.ar = curve_list(doc["ar"], "ar");
  if (doc.contains("ma")) spec.ma = curve_list(doc["ma"], "ma");
  if (doc.contains("trend")) spec.trend = curve_from_json(doc["trend"], "trend");
  if (doc.contains("amplitude")) spec.amplitude = curve_from_json(doc["amplitude"], "amplitude");
  if (doc.contains("sigma")) {
    if (!doc["sigma"].is_number()) throw InvalidArgument("spec field 'sigma' must be a number");
    spec.innovations.sigma = doc["sigma"].get<double>();
  }
  if (doc.contains("distribution")) {
    if (!doc["distribution"].is_string()) {
      throw InvalidArgument("spec field 'distribution' must be a string");
    }
    spec.innovations.distribution = parse_distribution(doc["distribution"].get<std::string>());
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw InvalidArgument("spec field 'seed' must be a non-negative integer");
    }
    spec.innovations.seed = doc["seed"].get<std::uint64_t>();
  }
  validate(spec);
  return spec;
}

ProcessSpec preset_spec(std::string_view name) {
  ProcessSpec spec;
  spec.kind = ProcessKind::tvdma;
  if (name == "figure1") {
    spec.ma = {CurveExpr::parse("-1.8*cos(1.5-cos(4*pi*u))"), CurveExpr::parse("0.81")};
  } else if (name == "figure2") {
    spec.ma = {CurveExpr::parse("1.2*cos(2*pi*u)"), CurveExpr::parse("2*cos(1.5-cos(8*pi*u))"),
               CurveExpr::parse("u")};
  } else if (name == "white") {
    spec.ma = {CurveExpr::constant(1.0)};
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) +
                          "' (expected figure1, figure2 or white)");
  }
  return spec;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Dyadic (Walsh) spectral analysis of locally stationary time series",
               "walsh-spectra"};
  app.add_option("command", cfg.command, "simulate|spectrum|convert|verify|periodogram|figures")
      ->required()
      ->check(CLI::IsMember(
          {"simulate", "spectrum", "convert", "verify", "periodogram", "figures"}));
  app.add_option("--spec", cfg.spec_path, "Process spec JSON file");
  app.add_option("--preset", cfg.preset, "Built-in spec")
      ->check(CLI::IsMember({"figure1", "figure2", "white"}));
  app.add_option("--T", cfg.T, "Series length (power of two)");
  app.add_option("--seed", cfg.seed, "Override the seed of the process file");
  app.add_option("--out", cfg.out, "Output file (directory for figures); '-' for stdout");
  app.add_option("--u-points", cfg.u_points, "Number of u grid points on [0,1]");
  app.add_option("--m", cfg.m, "Dyadic grid exponent (2^m x-points)");
  app.add_option("--segments", cfg.segment_length, "Periodogram segment length N");
  app.add_option("--step", cfg.step, "Segment step (default N: aligned)");
  app.add_option("--smooth", cfg.smooth, "Smoothing half-width in bins");
  app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
  app.add_option("--mode", cfg.mode, "Verification mode")
      ->check(CLI::IsMember({"frozen", "conversion"}));
  app.add_option("--radius", cfg.radius, "Verification window radius");
  app.add_option("--target", cfg.target, "Conversion target")->check(CLI::IsMember({"dma", "dar"}));
  app.add_option("--input", cfg.input, "Path CSV for periodogram (t,u,x_value)");
  app.add_option("--lambda-points", cfg.lambda_points, "Fourier grid points on [0,pi]");
  app.add_option("--fourier-out", cfg.fourier_out, "Fourier density output file");
  app.add_option("--Ts", cfg.Ts, "Comma-separated T values for verify")->delimiter(',');
  app.add_option("--u0", cfg.u0, "Verification centre in rescaled time");
  app.add_flag_function(
      "--version", [&](std::int64_t) { throw CLI::CallForVersion(std::string(kVersion), 0); },
      "Print the version");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "walsh-spectra " << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "config", e.what());
    return kConfigError;
  }

  try {
    if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg, out, err);
    if (cfg.command == "convert") return cmd_convert(cfg, out, err);
    if (cfg.command == "verify") return cmd_verify(cfg, out, err);
    if (cfg.command == "periodogram") return cmd_periodogram(cfg, out, err);
    return cmd_figures(cfg, out, err);
  } catch (const SingularBlock& e) {
    print_error(err, "singular_block", e.what());
    return kSingular;
  } catch (const SingularPolynomial& e) {
    print_error(err, "singular_polynomial", e.what());
    return kSingular;
  } catch (const VerificationFailure& e) {
    print_error(err, "verification", e.what());
    return kVerificationFailed;
  } catch (const CurveSyntaxError& e) {
    print_error(err, "parse", e.what());
    return kConfigError;
  } catch (const CurveDomainError& e) {
    print_error(err, "curve_domain", e.what());
    return kConfigError;
  } catch (const json::exception& e) {
    print_error(err, "parse", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    print_error(err, "io", e.what());
    return kConfigError;
  } catch (const Error& e) {
    print_error(err, "config", e.what());
    return kConfigError;
  }
}

}  // namespace walsh::cli
