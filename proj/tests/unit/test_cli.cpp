#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "walsh/cli.hpp"
#include "walsh/curve.hpp"
#include "walsh/errors.hpp"

using namespace walsh;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "walsh_spectra_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(cli::format_double(0.1) == "0.1");
  CHECK(cli::format_double(1.0) == "1");
  CHECK(cli::format_double(-2.5e-10) == "-2.5e-10");
  const double x = 2.0 / 3.0;
  CHECK(std::stod(cli::format_double(x)) == x);
}

TEST_CASE("spec files") {
  const auto s = cli::parse_spec_json(R"J({"kind":"tvDARMA","ar":["1","0.3*u"],"ma":[1,0.5],
      "trend":"u","amplitude":1,"sigma":2,"distribution":"rademacher","seed":9})J");
  CHECK(s.kind == ProcessKind::tvdarma);
  CHECK(s.ar.size() == 2);
  CHECK(s.ma[1](0.0) == 0.5);
  CHECK(s.trend(0.25) == 0.25);
  CHECK(s.innovations.sigma == 2.0);
  CHECK(s.innovations.distribution == Distribution::rademacher);
  CHECK(s.innovations.seed == 9);

  CHECK_THROWS_AS(cli::parse_spec_json(R"J({"ma":["1"]})J"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_spec_json(R"J({"kind":"tvDMA","colour":1})J"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_spec_json(R"J({"kind":"tvDMA","ma":["cos("]})J"), CurveSyntaxError);
  CHECK_THROWS_AS(cli::parse_spec_json(R"J({"kind":"tvDMA","ma":[]})J"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_spec_json(R"J({"kind":"tvDMA","seed":-1})J"), InvalidArgument);
  CHECK_THROWS(cli::parse_spec_json("{not json"));

  CHECK(cli::preset_spec("figure1").ma.size() == 2);
  CHECK(cli::preset_spec("figure2").ma.size() == 3);
  CHECK_THROWS_AS(cli::preset_spec("figure3"), InvalidArgument);
}

TEST_CASE("simulate") {
  const auto spec = scratch("white.json");
  write(spec, R"J({"kind":"tvDMA","ma":["1"],"seed":4})J");
  const auto out = scratch("white.csv");
  auto r = run({"simulate", "--spec", spec.string(), "--T", "8", "--out", out.string()});
  REQUIRE(r.code == 0);
  const std::string first = slurp(out);
  CHECK(first.rfind("# walsh-spectra ", 0) == 0);
  const auto rows = csv_rows(first);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"t", "u", "x_value"});
  CHECK(rows[8][0] == "7");
  CHECK(rows[8][1] == "0.875");

  const auto side = nlohmann::json::parse(slurp(out.string() + ".json"));
  CHECK(side["T"] == 8);
  CHECK(side["seed"] == 4);
  CHECK(side["spec_fingerprint"].get<std::string>().size() == 16);

  r = run({"simulate", "--spec", spec.string(), "--T", "8", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(out) == first);

  r = run({"simulate", "--spec", spec.string(), "--T", "8", "--seed", "5", "--out", out.string()});
  CHECK(slurp(out) != first);

  r = run({"simulate", "--preset", "figure1", "--T", "4096", "--out", scratch("fig1.csv").string()});
  CHECK(r.code == 0);
  CHECK(csv_rows(slurp(scratch("fig1.csv"))).size() == 4097);
}

TEST_CASE("exit codes and error categories") {
  auto r = run({"simulate", "--preset", "white", "--T", "6", "--out", "-"});
  CHECK(r.code == 2);
  CHECK(r.err.find("category=config") != std::string::npos);

  r = run({"bogus"});
  CHECK(r.code == 2);

  r = run({"simulate", "--T", "8"});
  CHECK(r.code == 2);

  const auto bad = scratch("bad.json");
  write(bad, R"J({"kind":"tvDMA","ma":["1+"]})J");
  r = run({"simulate", "--spec", bad.string(), "--T", "8", "--out", "-"});
  CHECK(r.code == 2);
  CHECK(r.err.find("category=parse") != std::string::npos);

  r = run({"simulate", "--spec", scratch("missing.json").string(), "--T", "8"});
  CHECK(r.code == 2);
  CHECK(r.err.find("category=io") != std::string::npos);

  const auto sing = scratch("sing.json");
  write(sing, R"J({"kind":"tvDAR","ar":["1","exp(u-0.53125)"]})J");
  r = run({"simulate", "--spec", sing.string(), "--T", "16", "--out", "-"});
  CHECK(r.code == 3);
  CHECK(r.err.find("category=singular_block") != std::string::npos);
  CHECK(r.err.find("block 4") != std::string::npos);

  r = run({"--help"});
  CHECK(r.code == 0);
}

TEST_CASE("spectrum") {
  auto r = run({"spectrum", "--preset", "figure1", "--u-points", "3", "--m", "1", "--out", "-"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"u", "x", "g"});
  const double a0 = -1.8 * std::cos(0.5);
  CHECK(std::abs(std::stod(rows[1][2]) - (a0 + 0.81) * (a0 + 0.81)) <= 1e-12);
  CHECK(std::abs(std::stod(rows[2][2]) - (a0 - 0.81) * (a0 - 0.81)) <= 1e-12);

  r = run({"spectrum", "--preset", "white", "--u-points", "2", "--m", "3", "--out", "-"});
  REQUIRE(r.code == 0);
  rows = csv_rows(r.out);
  REQUIRE(rows.size() == 17);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] == "1");

  r = run({"spectrum", "--preset", "figure2", "--u-points", "1", "--m", "2", "--out", "-"});
  REQUIRE(r.code == 0);
  rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][2] == rows[2][2]);
  CHECK(rows[1][2] != rows[3][2]);

  const auto g = scratch("fig1_g.csv");
  r = run({"spectrum", "--preset", "figure1", "--u-points", "2", "--lambda-points", "3", "--out",
           g.string()});
  REQUIRE(r.code == 0);
  const auto f = csv_rows(slurp(g.string() + ".fourier.csv"));
  REQUIRE(f.size() == 7);
  CHECK(f[0] == std::vector<std::string>{"u", "lambda", "f"});

  const auto sing = scratch("dar_sing.json");
  write(sing, R"J({"kind":"tvDAR","ar":["1","2*u"]})J");
  r = run({"spectrum", "--spec", sing.string(), "--u-points", "5", "--out", "-"});
  CHECK(r.code == 3);
  CHECK(r.err.find("u = 0.5") != std::string::npos);
}

TEST_CASE("convert") {
  const auto dar = scratch("dar.json");
  write(dar, R"J({"kind":"tvDAR","ar":["2","1"]})J");
  auto r = run({"convert", "--spec", dar.string(), "--u-points", "3", "--out", "-"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"u", "j", "K_j"});
  for (std::size_t i = 1; i < rows.size(); i += 2) {
    CHECK(std::stod(rows[i][2]) == doctest::Approx(2.0 / 3.0));
    CHECK(std::stod(rows[i + 1][2]) == doctest::Approx(-1.0 / 3.0));
  }

  r = run({"convert", "--preset", "figure1", "--u-points", "2", "--out", "-"});
  REQUIRE(r.code == 0);
  const auto fig = csv_rows(r.out);
  CHECK(std::stod(fig[1][2]) == doctest::Approx(-1.8 * std::cos(0.5)).epsilon(1e-15));
  CHECK(std::stod(fig[2][2]) == 0.81);

  const auto ma = scratch("ma11.json");
  write(ma, R"J({"kind":"tvDMA","ma":["1","1"]})J");
  r = run({"convert", "--spec", ma.string(), "--target", "dar", "--out", "-"});
  CHECK(r.code == 3);
  CHECK(r.err.find("category=singular_polynomial") != std::string::npos);
}

TEST_CASE("verify") {
  const auto c = scratch("const.json");
  write(c, R"J({"kind":"tvDMA","ma":["1","0.5"]})J");
  auto r = run({"verify", "--spec", c.string(), "--replicates", "2", "--Ts", "64,128,256", "--out", "-"});
  REQUIRE(r.code == 0);
  auto rep = nlohmann::json::parse(r.out);
  CHECK(rep["exact"] == true);
  CHECK(rep["passed"] == true);

  const auto s = scratch("smooth.json");
  write(s, R"J({"kind":"tvDMA","ma":["1+u","0.5*u"]})J");
  r = run({"verify", "--spec", s.string(), "--replicates", "5", "--Ts", "128,256,512,1024", "--out", "-"});
  CHECK(r.code == 0);
  rep = nlohmann::json::parse(r.out);
  CHECK(rep["slope"].get<double>() < -0.6);
  CHECK(rep["T_values"].size() == 4);

  // A coefficient flat to second order at the centre decays like 1/T^3, outside the range.
  const auto flat = scratch("flat_centre.json");
  write(flat, R"J({"kind":"tvDMA","ma":["1","(u-0.5)^3*40"]})J");
  r = run({"verify", "--spec", flat.string(), "--replicates", "3", "--Ts", "128,256,512", "--out", "-"});
  CHECK(r.code == 4);
  CHECK(r.err.find("category=verification") != std::string::npos);

  r = run({"verify", "--spec", s.string(), "--mode", "sideways"});
  CHECK(r.code == 2);
}

TEST_CASE("periodogram") {
  auto r = run({"periodogram", "--preset", "white", "--T", "64", "--segments", "16", "--out", "-"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 1 + 4 * 16);
  CHECK(rows[0] == std::vector<std::string>{"segment_u0", "x", "I"});
  CHECK(rows[1][0] == "0.125");

  const auto once = run({"periodogram", "--preset", "white", "--T", "64", "--segments", "16",
                         "--replicates", "8", "--smooth", "1", "--out", "-"});
  const auto twice = run({"periodogram", "--preset", "white", "--T", "64", "--segments", "16",
                          "--replicates", "8", "--smooth", "1", "--out", "-"});
  CHECK(once.code == 0);
  CHECK(once.out == twice.out);

  // Constant data read from a path file: impulse at x = 0.
  const auto path = scratch("const_path.csv");
  std::string text = "# walsh-spectra 0.1.0 spec=0123456789abcdef\nt,u,x_value\n";
  for (int t = 0; t < 8; ++t) text += std::to_string(t) + "," + std::to_string(t / 8.0) + ",3\n";
  write(path, text);
  r = run({"periodogram", "--input", path.string(), "--segments", "8", "--out", "-"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("spec=0123456789abcdef") != std::string::npos);
  rows = csv_rows(r.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[1][2] == "72");
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i][2] == "0");

  r = run({"periodogram", "--preset", "white", "--T", "64", "--segments", "128", "--out", "-"});
  CHECK(r.code == 2);
}

TEST_CASE("figures") {
  const auto dir = scratch("figs");
  fs::remove_all(dir);
  const auto r = run({"figures", "--out", dir.string(), "--u-points", "5", "--m", "3"});
  REQUIRE(r.code == 0);
  for (const char* name : {"figure1_dyadic.csv", "figure1_fourier.csv", "figure2_dyadic.csv",
                           "figure2_fourier.csv"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  CHECK(csv_rows(slurp(dir / "figure1_dyadic.csv")).size() == 1 + 5 * 8);
  const std::string before = slurp(dir / "figure2_dyadic.csv");
  run({"figures", "--out", dir.string(), "--u-points", "5", "--m", "3"});
  CHECK(slurp(dir / "figure2_dyadic.csv") == before);
}
