#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/parallel.hpp"
#include "dklab/core/rng.hpp"
#include "dklab/core/spectral.hpp"
#include "dklab/core/stats.hpp"
#include "dklab/core/torus.hpp"
#include "oracles.hpp"

using namespace dklab;

TEST_CASE("philox block matches published known-answer vectors", "[rng]") {
  using philox::block;
  CHECK(block({0, 0, 0, 0}, {0, 0}) == philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct", "[rng]") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  CHECK(a.position() == 64);
  CHECK(RngStream(42, 7).substream(1).stream_id() == 8);
  CHECK(replicate_stream_id(3, 5) == (std::uint64_t{3} << 32) + 5);
}

TEST_CASE("uniform draws pass a Kolmogorov-Smirnov test", "[rng]") {
  RngStream s(2024, 0);
  const std::size_t n = 100000;
  std::vector<double> u(n);
  for (auto& x : u) {
    x = s.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  std::sort(u.begin(), u.end());
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
    dmax = std::max({dmax, u[i] - lo, hi - u[i]});
  }
  // critical value at level 0.001
  CHECK(dmax < 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("normal draws have unit variance and Gaussian increments scale", "[rng]") {
  RngStream s(11, 3);
  const auto z = gaussian_increment(s, 200000, 4.0);
  const auto st = summarize(z);
  CHECK(std::abs(st.mean) < 4.0 * std::sqrt(4.0 / 200000.0));
  CHECK(std::abs(st.variance - 4.0) < 4.0 * 4.0 * std::sqrt(2.0 / 200000.0));
  CHECK_THROWS_AS(gaussian_increment(s, 3, 0.0), std::domain_error);
}

TEST_CASE("ordered reduction is invariant to thread count", "[parallel]") {
  std::vector<double> slots1(10007), slots4(10007);
  auto fill = [](std::vector<double>& v, unsigned threads) {
    parallel_for(v.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) v[i] = std::sin(static_cast<double>(i)) * 1e3 + 1.0 / (1.0 + i);
    });
  };
  fill(slots1, 1);
  fill(slots4, 4);
  CHECK(slots1 == slots4);
  CHECK(ordered_sum(slots1) == ordered_sum(slots4));
  CHECK_THROWS(parallel_for(8, 4, [](std::size_t b, std::size_t) {
    if (b > 0) throw std::runtime_error("worker");
  }));
}

TEST_CASE("torus domain validates grid size", "[torus]") {
  CHECK_THROWS_AS(TorusDomain(100), std::invalid_argument);
  CHECK_THROWS_AS(TorusDomain(4), std::invalid_argument);
  const TorusDomain d(64);
  CHECK(d.spacing() == 1.0 / 64);
  CHECK(d.max_resolved_mode() == 31);
  CHECK(wrap_unit(-0.25) == 0.75);
  CHECK(wrap_unit(1.0) == 0.0);
}

namespace {
FourierFunction sample_f() { return FourierFunction(0.3, {0.5, -0.2, 0.1}, {0.4, 0.0, -0.3}); }
FourierFunction sample_g() { return FourierFunction(-1.0, {0.0, 0.7}, {1.1}); }
}  // namespace

TEST_CASE("jets agree with the direct series", "[fourier]") {
  const auto f = sample_f();
  for (double x : {0.0, 0.13, 0.5, 0.91}) {
    const auto j = f.jet(x);
    CHECK(j.value == Catch::Approx(f(x)).margin(1e-13));
    CHECK(j.first == Catch::Approx(derivative(f)(x)).margin(1e-11));
    CHECK(j.second == Catch::Approx(generator_L(f)(x)).margin(1e-9));
  }
}

TEST_CASE("products are exact and the carre du champ identity holds", "[fourier]") {
  const auto f = sample_f(), g = sample_g();
  const auto fg = multiply(f, g);
  CHECK(fg.max_mode() == 5);
  const auto half_defect = (generator_L(fg) - multiply(f, generator_L(g)) - multiply(g, generator_L(f))) * 0.5;
  const auto gamma = carre_du_champ(f, g);
  for (double x : {0.05, 0.3, 0.77}) {
    CHECK(fg(x) == Catch::Approx(f(x) * g(x)).margin(1e-12));
    CHECK(gamma(x) == Catch::Approx(half_defect(x)).margin(1e-9));
    CHECK(gamma(x) == Catch::Approx(derivative(f)(x) * derivative(g)(x)).margin(1e-10));
    CHECK(gamma.as_fourier()(x) == Catch::Approx(gamma(x)).margin(1e-10));
  }
}

TEST_CASE("heat semigroup: semigroup law, diffusion equation and Crank-Nicolson oracle", "[fourier][semigroup]") {
  const auto f = sample_f();
  const double d = 1.5;
  const auto a = heat_semigroup(heat_semigroup(f, d, 0.01), d, 0.02);
  const auto b = heat_semigroup(f, d, 0.03);
  for (double x : {0.1, 0.4, 0.8}) CHECK(a(x) == Catch::Approx(b(x)).margin(1e-14));

  // d/dt P_t f = (d/2) f'' by a centred difference in time
  const double t = 0.02, h = 1e-5;
  const auto dt_f = (heat_semigroup(f, d, t + h) - heat_semigroup(f, d, t - h)) * (0.5 / h);
  const auto rhs = generator_L(heat_semigroup(f, d, t)) * (0.5 * d);
  for (double x : {0.2, 0.6}) CHECK(dt_f(x) == Catch::Approx(rhs(x)).margin(1e-6));

  const std::size_t cells = 4096;
  const auto fd = oracle::heat_cn([&](double x) { return f(x); }, 0.5 * d, 0.05, cells, 2000);
  const auto spectral = heat_semigroup(f, d, 0.05);
  double worst = 0.0;
  for (std::size_t j = 0; j < cells; j += 17) worst = std::max(worst, std::abs(fd[j] - spectral(static_cast<double>(j) / cells)));
  CHECK(worst < 1e-6);
  CHECK_THROWS_AS(heat_semigroup(f, d, -1.0), std::domain_error);
  CHECK_THROWS_AS(heat_semigroup(f, 0.0, 1.0), std::domain_error);
}

TEST_CASE("spectral projection inverts synthesis on resolved modes", "[spectral]") {
  const TorusDomain dom(64);
  const auto f = sample_f();
  const auto back = project(dom, synthesize(dom, f));
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(back.cos_coeff(k) == Catch::Approx(f.cos_coeff(k)).margin(1e-14));
    CHECK(back.sin_coeff(k) == Catch::Approx(f.sin_coeff(k)).margin(1e-14));
  }
  CHECK(back.mean() == Catch::Approx(f.mean()).margin(1e-14));
  const auto direct = f.sample(dom);
  const auto fft = synthesize(dom, f);
  for (std::size_t j = 0; j < 64; ++j) CHECK(fft[j] == Catch::Approx(direct[j]).margin(1e-13));
}

TEST_CASE("trigonometric extrema are located to round-off", "[fourier]") {
  const auto e = extrema(FourierFunction::cosine(1, 1.0));
  CHECK(e.max == Catch::Approx(1.0).margin(1e-15));
  CHECK(e.min == Catch::Approx(-1.0).margin(1e-15));
  CHECK(e.argmin == Catch::Approx(0.5).margin(1e-7));
  const auto f = sample_g();
  const auto ef = extrema(f);
  for (int i = 0; i < 2000; ++i) {
    const double x = i / 2000.0;
    CHECK(f(x) >= ef.min - 1e-14);
    CHECK(f(x) <= ef.max + 1e-14);
  }
  CHECK(sup_norm(f) == Catch::Approx(std::max(std::abs(ef.min), std::abs(ef.max))));
}

TEST_CASE("chi-square goodness of fit and false-alarm budget", "[stats]") {
  const std::vector<std::size_t> obs{250, 250, 250, 250};
  const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
  const auto r = chi_square_gof(obs, p);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == Catch::Approx(1.0));
  const std::vector<std::size_t> skew{400, 200, 200, 200};
  CHECK(chi_square_gof(skew, p).p_value < 1e-10);
  // tiny expected counts get merged
  const std::vector<std::size_t> tail{990, 9, 1, 0};
  const std::vector<double> q{0.99, 0.009, 0.0009, 0.0001};
  CHECK(chi_square_gof(tail, q).bins == 2);
  CHECK(false_alarm_budget(27, kThreeSigmaTail) == 1);
  CHECK(false_alarm_budget(0, kThreeSigmaTail) == 0);
}
