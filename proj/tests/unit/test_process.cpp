#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "walsh/errors.hpp"
#include "walsh/process.hpp"
#include "walsh/spectra.hpp"

using namespace walsh;

namespace {

std::vector<CurveExpr> curves(std::initializer_list<const char*> texts) {
  std::vector<CurveExpr> out;
  for (const char* t : texts) out.push_back(CurveExpr::parse(t));
  return out;
}

std::vector<CurveExpr> constants(const std::vector<double>& values) {
  std::vector<CurveExpr> out;
  for (double v : values) out.push_back(CurveExpr::constant(v));
  return out;
}

ProcessSpec make_spec(ProcessKind kind, std::vector<CurveExpr> ar, std::vector<CurveExpr> ma,
                      std::uint64_t seed = 1) {
  ProcessSpec s;
  s.kind = kind;
  s.ar = std::move(ar);
  s.ma = std::move(ma);
  s.innovations.seed = seed;
  return s;
}

// max_t |Σ_k b_k(t/T) X_{t⊕k} - Σ_n a_n(t/T) ε_{t⊕n}|
double defining_residual(const ProcessSpec& spec, const SamplePath& p) {
  const std::size_t T = p.T;
  double worst = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(T);
    double lhs = 0.0;
    for (std::size_t k = 0; k < spec.ar.size(); ++k) lhs += spec.ar[k](u) * (p.values[t ^ k] - spec.trend(static_cast<double>(t ^ k) / static_cast<double>(T)));
    double rhs = 0.0;
    for (std::size_t n = 0; n < spec.ma.size(); ++n) rhs += spec.ma[n](u) * p.innovations[t ^ n];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace

TEST_CASE("innovations") {
  InnovationSpec g{Distribution::gaussian, 1.0, 42};
  const auto a = make_innovations(g, 1024);
  const auto b = make_innovations(g, 1024);
  CHECK(a == b);
  CHECK(innovation_at(g, 17) == a[17]);
  // A prefix of a longer draw is the shorter draw.
  const auto c = make_innovations(g, 4096);
  CHECK(std::equal(a.begin(), a.end(), c.begin()));
  g.seed = 43;
  CHECK(make_innovations(g, 1024) != a);

  InnovationSpec r{Distribution::rademacher, 1.0, 7};
  for (double v : make_innovations(r, 4096)) CHECK((v == 1.0 || v == -1.0));

  for (auto d : {Distribution::gaussian, Distribution::rademacher, Distribution::uniform}) {
    InnovationSpec s{d, 1.5, 99};
    const auto e = make_innovations(s, 1 << 16);
    const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    double var = 0.0;
    for (double v : e) var += (v - mean) * (v - mean);
    var /= static_cast<double>(e.size());
    CAPTURE(to_string(d));
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var / 2.25 - 1.0) < 0.03);
  }

  CHECK_THROWS_AS(make_innovations(g, 0), InvalidArgument);
  CHECK_THROWS_AS(make_innovations(InnovationSpec{Distribution::gaussian, 0.0, 1}, 8), InvalidArgument);
  CHECK(parse_distribution("normal") == Distribution::gaussian);
  CHECK_THROWS_AS(parse_distribution("cauchy"), InvalidArgument);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("spec validation and fingerprints") {
  auto s = make_spec(ProcessKind::tvdma, constants({1.0}), curves({"1", "0.5+u"}));
  CHECK_NOTHROW(validate(s));
  CHECK(s.ma_length() == 2);
  CHECK(s.block_length() == 2);

  auto bad = s;
  bad.ar = constants({1.0, 0.5});
  CHECK_THROWS_AS(validate(bad), InvalidArgument);

  auto dar = make_spec(ProcessKind::tvdar, constants({2.0, 1.0}), constants({1.0, 0.3}));
  CHECK_THROWS_AS(validate(dar), InvalidArgument);

  auto mod = make_spec(ProcessKind::modulated, curves({"1"}), curves({"1", "u"}));
  CHECK_THROWS_AS(validate(mod), InvalidArgument);

  auto sigma = s;
  sigma.innovations.sigma = -1.0;
  CHECK_THROWS_AS(validate(sigma), InvalidArgument);

  CHECK(parse_process_kind("TVDARMA") == ProcessKind::tvdarma);
  CHECK_THROWS_AS(parse_process_kind("arma"), InvalidArgument);

  CHECK(fingerprint(s) == fingerprint(s));
  auto other = s;
  other.innovations.seed = 2;
  CHECK(fingerprint(other) != fingerprint(s));
  CHECK(hex64(0xabcULL) == "0000000000000abc");

  const auto warn = make_spec(ProcessKind::tvdma, constants({1.0}), curves({"1", "0.5", "0", "0"}));
  CHECK(spec_warnings(warn).size() == 1);
  CHECK(spec_warnings(s).empty());
}

TEST_CASE("tvDMA simulation") {
  SUBCASE("white noise with trend") {
    auto s = make_spec(ProcessKind::tvdma, constants({1.0}), constants({1.0}), 5);
    s.trend = CurveExpr::parse("2*u");
    const auto p = simulate_tvdma(s, 64);
    for (std::size_t t = 0; t < 64; ++t) {
      CHECK(p.values[t] == doctest::Approx(p.innovations[t] + 2.0 * p.u(t)).epsilon(1e-15));
    }
  }

  SUBCASE("exact finite sum") {
    auto s = make_spec(ProcessKind::tvdma, constants({1.0}), curves({"1+u", "-0.5*u", "0.25", "cos(u)"}), 8);
    const std::size_t T = 256;
    const auto p = simulate(s, T);
    for (std::size_t t = 0; t < T; ++t) {
      const double u = p.u(t);
      const double expect = (1 + u) * p.innovations[t] - 0.5 * u * p.innovations[t ^ 1] +
                            0.25 * p.innovations[t ^ 2] + std::cos(u) * p.innovations[t ^ 3];
      REQUIRE(std::abs(p.values[t] - expect) <= 1e-12);
    }
  }

  SUBCASE("T restrictions") {
    auto s = make_spec(ProcessKind::tvdma, constants({1.0}), constants({1.0, 0.5, 0.2, 0.1}));
    CHECK_THROWS_AS(simulate(s, 2), InvalidArgument);
    CHECK_THROWS_AS(simulate(s, 48), InvalidArgument);
    CHECK_NOTHROW(simulate(s, 4));
    auto dar = make_spec(ProcessKind::tvdar, constants({2.0, 1.0}), constants({1.0}));
    CHECK_THROWS_AS(simulate_tvdma(dar, 8), InvalidArgument);
  }

  SUBCASE("coefficient slack shifts every MA coefficient by K/T") {
    auto s = make_spec(ProcessKind::tvdma, constants({1.0}), constants({1.0, 0.5}), 3);
    SimulationOptions o;
    o.coefficient_slack = 2.0;
    const std::size_t T = 32;
    const auto p = simulate(s, T, o);
    for (std::size_t t = 0; t < T; ++t) {
      const double k = 2.0 / static_cast<double>(T);
      CHECK(std::abs(p.values[t] - ((1 + k) * p.innovations[t] + (0.5 + k) * p.innovations[t ^ 1])) <= 1e-14);
    }
  }
}

TEST_CASE("tvDARMA simulation") {
  SUBCASE("constant DAR(1) b=(2,1)") {
    auto s = make_spec(ProcessKind::tvdar, constants({2.0, 1.0}), constants({1.0}), 11);
    const std::size_t T = 1024;
    const auto p = simulate_tvdarma(s, T);
    double worst = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      worst = std::max(worst, std::abs(2 * p.values[t] + p.values[t ^ 1] - p.innovations[t]));
    }
    CHECK(worst <= 1e-12);

    auto k = make_spec(ProcessKind::tvdma, constants({1.0}), constants({2.0 / 3.0, -1.0 / 3.0}), 11);
    const auto q = simulate(k, T);
    for (std::size_t t = 0; t < T; ++t) REQUIRE(std::abs(p.values[t] - q.values[t]) <= 1e-10);
  }

  SUBCASE("time-varying tvDARMA satisfies its defining equation") {
    auto s = make_spec(ProcessKind::tvdarma, curves({"1", "0.3*cos(2*pi*u)", "0.2*u", "-0.1"}),
                       curves({"1", "0.4+0.3*u", "0", "0.2*sin(pi*u)"}), 21);
    s.trend = CurveExpr::parse("u^2");
    const auto p = simulate(s, 2048);
    CHECK(defining_residual(s, p) <= 1e-9);
  }

  SUBCASE("dense-solve oracle on a time-varying block") {
    auto s = make_spec(ProcessKind::tvdar, curves({"1", "0.5*u", "0.25", "-0.3*u"}), constants({1.0}), 4);
    const std::size_t T = 16;
    const auto p = simulate(s, T);
    for (std::size_t base = 0; base < T; base += 4) {
      Eigen::Matrix4d m;
      Eigen::Vector4d r;
      for (int i = 0; i < 4; ++i) {
        const double u = static_cast<double>(base + static_cast<std::size_t>(i)) / static_cast<double>(T);
        for (int j = 0; j < 4; ++j) m(i, j) = s.ar[static_cast<std::size_t>(i ^ j)](u);
        r(i) = p.innovations[base + static_cast<std::size_t>(i)];
      }
      const Eigen::Vector4d x = m.fullPivLu().solve(r);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(x(i) - p.values[base + static_cast<std::size_t>(i)]) <= 1e-12);
    }
  }

  SUBCASE("singular block is reported with its index") {
    // Block rows (1, b1(t/T)) and (b1((t+1)/T), 1) are dependent when
    // b1(t/T)·b1((t+1)/T) = 1; with b1 = exp(u - 17/32) that happens at t = 8.
    auto s = make_spec(ProcessKind::tvdar, curves({"1", "exp(u-0.53125)"}), constants({1.0}));
    const std::size_t T = 16;
    try {
      simulate(s, T);
      FAIL("expected SingularBlock");
    } catch (const SingularBlock& e) {
      CHECK(e.block_index() == 4);
      CHECK(e.rcond() <= 1e-9);
    }
    auto c = make_spec(ProcessKind::tvdar, constants({1.0, 1.0}), constants({1.0}));
    CHECK_THROWS_AS(simulate(c, 8), SingularBlock);
  }

  SUBCASE("block locality") {
    auto s = make_spec(ProcessKind::tvdarma, curves({"1", "0.3*u"}), curves({"1", "0.5", "0.1*u", "0.2"}), 6);
    const std::size_t T = 64;
    auto eps = make_innovations(s.innovations, T);
    const auto p = simulate_with_innovations(s, T, eps);
    auto shuffled = eps;
    std::mt19937_64 rng(1);
    std::shuffle(shuffled.begin() + 8, shuffled.end(), rng);
    const auto q = simulate_with_innovations(s, T, shuffled);
    for (std::size_t t = 0; t < 4; ++t) CHECK(p.values[t] == q.values[t]);
  }

  SUBCASE("stationary conversion equivalence") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ud(-0.4, 0.4);
    for (std::size_t n : {2, 4}) {
      std::vector<double> b(n), a(n);
      b[0] = 1.0;
      a[0] = 1.0;
      for (std::size_t k = 1; k < n; ++k) {
        b[k] = ud(rng);
        a[k] = ud(rng);
      }
      auto s = make_spec(ProcessKind::tvdarma, constants(b), constants(a), 9);
      const auto k = darma_to_dma(WalshPolynomial(b), WalshPolynomial(a));
      auto d = make_spec(ProcessKind::tvdma, constants({1.0}),
                         constants(std::vector<double>(k.coefficients().begin(), k.coefficients().end())), 9);
      const auto p = simulate(s, 512);
      const auto q = simulate(d, 512);
      double worst = 0.0;
      for (std::size_t t = 0; t < 512; ++t) worst = std::max(worst, std::abs(p.values[t] - q.values[t]));
      CHECK(worst <= 1e-9);
      const auto c = simulate_converted_dma(s, 512);
      for (std::size_t t = 0; t < 512; ++t) CHECK(std::abs(c.values[t] - p.values[t]) <= 1e-9);
    }
  }
}

TEST_CASE("modulated process") {
  auto s = make_spec(ProcessKind::modulated, curves({"1", "0.5"}), curves({"1", "0.3"}), 12);
  s.amplitude = CurveExpr::parse("1+u");
  s.trend = CurveExpr::parse("0.5");
  auto y = make_spec(ProcessKind::tvdarma, curves({"1", "0.5"}), curves({"1", "0.3"}), 12);
  const std::size_t T = 128;
  const auto p = simulate(s, T);
  const auto q = simulate(y, T);
  for (std::size_t t = 0; t < T; ++t) {
    CHECK(std::abs(p.values[t] - (0.5 + (1 + q.u(t)) * q.values[t])) <= 1e-12);
  }
  CHECK_THROWS_AS(simulate_tvdarma(s, T), InvalidArgument);

  // Frozen spectrum of a constant-σ modulated process is σ² g_Y.
  auto flat = s;
  flat.amplitude = CurveExpr::constant(2.0);
  const std::vector<double> u = {0.3};
  const auto gm = tv_dyadic_density(flat, u, 2);
  const auto gy = tv_dyadic_density(y, u, 2);
  for (std::size_t j = 0; j < 4; ++j) CHECK(gm.at(0, j) == doctest::Approx(4.0 * gy.at(0, j)));
}

TEST_CASE("frozen processes and conversion") {
  auto s = make_spec(ProcessKind::tvdma, constants({1.0}), curves({"-1.8*cos(1.5-cos(4*pi*u))", "0.81"}), 2);
  const std::size_t T = 1024;
  const auto tv = simulate(s, T);
  const auto fr = simulate_frozen(s, 0.5, T);
  CHECK(tv.innovations == fr.innovations);
  CHECK(approx_error(tv, fr, T / 2, 0) == 0.0);
  CHECK(approx_error(tv, tv, 100, 16) == 0.0);
  CHECK(approx_error(tv, fr, T / 2, 16) > 0.0);

  auto other = s;
  other.innovations.seed = 3;
  CHECK_THROWS_AS(approx_error(tv, simulate(other, T), 10, 2), InvalidArgument);
  CHECK_THROWS_AS(approx_error(tv, simulate(s, 512), 10, 2), InvalidArgument);

  auto c = make_spec(ProcessKind::tvdma, constants({1.0}), constants({1.0, 0.5}), 2);
  const auto cp = simulate(c, 256);
  const auto cf = simulate_frozen(c, 0.37, 256);
  CHECK(cp.values == cf.values);

  const auto fig2 = make_spec(ProcessKind::tvdma, constants({1.0}),
                              curves({"1.2*cos(2*pi*u)", "2*cos(1.5-cos(8*pi*u))", "u"}));
  const auto [ar, ma] = convert_spec_frozen(fig2, 0.0);
  CHECK(ar.size() == 1);
  REQUIRE(ma.size() == 4);
  CHECK(ma[0] == doctest::Approx(1.2));
  CHECK(ma[1] == doctest::Approx(2.0 * std::cos(0.5)));
  CHECK(ma[2] == 0.0);
  CHECK(ma[3] == 0.0);

  const auto dar = make_spec(ProcessKind::tvdar, curves({"1", "u/2+1/4"}), constants({1.0}));
  for (double u : {0.0, 0.3, 1.0}) {
    const double b1 = u / 2 + 0.25;
    const auto k = frozen_dma_coefficients(dar, u);
    // [[1,b1],[b1,1]] d = e0
    const double det = 1 - b1 * b1;
    CHECK(k[0] == doctest::Approx(1.0 / det));
    CHECK(k[1] == doctest::Approx(-b1 / det));
  }

  const auto sing = make_spec(ProcessKind::tvdar, curves({"1", "2*u"}), constants({1.0}));
  try {
    frozen_dma_coefficients(sing, 0.5);
    FAIL("expected SingularPolynomial");
  } catch (const SingularPolynomial& e) {
    CHECK(e.at_u() == 0.5);
  }
}

TEST_CASE("approximation decay report") {
  const std::vector<std::size_t> Ts = {128, 256, 512, 1024};
  auto c = make_spec(ProcessKind::tvdma, constants({1.0}), constants({1.0, 0.5}), 2);
  const auto exact = approximation_decay(c, ApproxMode::frozen, Ts, 0.5, 16, 3);
  CHECK(exact.exact);
  CHECK(exact.slope == 0.0);
  for (double e : exact.sup_errors) CHECK(e == 0.0);

  auto s = make_spec(ProcessKind::tvdma, constants({1.0}), curves({"1+u", "0.5*u"}), 2);
  const auto r = approximation_decay(s, ApproxMode::frozen, Ts, 0.5, 16, 5);
  CHECK_FALSE(r.exact);
  CHECK(r.sup_errors.size() == Ts.size());
  CHECK(r.slope == doctest::Approx(-1.0).epsilon(0.4));
  const auto again = approximation_decay(s, ApproxMode::frozen, Ts, 0.5, 16, 5);
  CHECK(again.sup_errors == r.sup_errors);

  CHECK(fit_loglog_slope(std::vector<std::size_t>{2, 4, 8}, std::vector<double>{1.0, 0.5, 0.25}) ==
        doctest::Approx(-1.0));
  CHECK_THROWS_AS(approximation_decay(s, ApproxMode::frozen, Ts, 0.5, 16, 0), InvalidArgument);
}
