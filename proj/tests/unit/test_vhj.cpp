#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dklab/vhj/checks.hpp"
#include "dklab/vhj/cole_hopf.hpp"
#include "oracles.hpp"

using namespace dklab;

namespace {
const TorusDomain kDom(256);
FourierFunction smooth_f() { return FourierFunction(0.2, {0.6, 0.1}, {-0.4, 0.25}); }
}  // namespace

TEST_CASE("Cole-Hopf field matches an independent finite-difference solve", "[vhj][oracle]") {
  const auto f = smooth_f();
  const double alpha = 1.0, t = 0.05;
  const auto field = cole_hopf(kDom, f, alpha, t);
  const std::size_t cells = 4096;
  const auto fd = oracle::vhj_imex([&](double x) { return f(x); }, alpha, t, cells, 5000);
  double worst = 0.0;
  for (std::size_t j = 0; j < cells; j += 16) {
    worst = std::max(worst, std::abs(fd[j] - field.value_at(static_cast<double>(j) / cells)));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("trivial cases and argument errors", "[vhj]") {
  const auto f = smooth_f();
  const auto at0 = cole_hopf(kDom, f, 1.0, 0.0);
  CHECK(at0.trivial());
  CHECK(at0.values()[17] == Catch::Approx(f(kDom.point(17))).margin(1e-15));
  const auto c = cole_hopf(kDom, FourierFunction::constant(3.0), 2.0, 0.4);
  CHECK(c.values()[5] == 3.0);
  CHECK_THROWS_AS(cole_hopf(kDom, f, 0.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(cole_hopf(kDom, f, 1.0, -0.1), std::domain_error);
}

TEST_CASE("V_t is a flow: V_{t+s} = V_t V_s", "[vhj][property]") {
  const auto f = smooth_f();
  const double alpha = 0.7;
  const auto vs = cole_hopf(kDom, f, alpha, 0.03).to_fourier();
  const auto composed = cole_hopf(kDom, vs, alpha, 0.02);
  const auto direct = cole_hopf(kDom, f, alpha, 0.05);
  for (std::size_t j = 0; j < kDom.grid_size(); j += 7) CHECK(composed.values()[j] == Catch::Approx(direct.values()[j]).margin(1e-10));
}

TEST_CASE("V_t is monotone and commutes with constants", "[vhj][property]") {
  const auto f = smooth_f();
  const auto g = f + FourierFunction(0.3, {0.1}, {});  // g - f >= 0.2
  const auto vf = cole_hopf(kDom, f, 1.3, 0.1), vg = cole_hopf(kDom, g, 1.3, 0.1);
  const auto vc = cole_hopf(kDom, f + FourierFunction::constant(2.0), 1.3, 0.1);
  for (std::size_t j = 0; j < kDom.grid_size(); ++j) {
    CHECK(vg.values()[j] >= vf.values()[j]);
    CHECK(vc.values()[j] == Catch::Approx(vf.values()[j] + 2.0).margin(1e-12));
  }
}

TEST_CASE("residual decreases at second order under time refinement", "[vhj]") {
  const auto levels = residual_refinement(kDom, smooth_f(), 1.0, 0.05, 1e-3, 3);
  REQUIRE(levels.size() == 3);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    REQUIRE(levels[i].observed_order);
    CHECK(*levels[i].observed_order >= 1.9);
  }
  CHECK_THROWS_AS(residual_refinement(kDom, smooth_f(), 1.0, 0.05, 0.1), std::invalid_argument);
}

TEST_CASE("extremum principles and gradient estimate on a random suite", "[vhj][property]") {
  for (std::size_t i = 0; i < 20; ++i) {
    RngStream s(909, i);
    const auto f = random_test_function(s);
    for (double alpha : {0.5, 1.0, 3.0}) {
      const auto field = cole_hopf(kDom, f, alpha, 0.05);
      const auto e = check_extremum_principles(field);
      CHECK(e.holds);
      const auto g = check_gradient_estimate(field);
      CHECK(g.holds);
      CHECK(g.sharp_holds);
      CHECK(field.projection_error() < 1e-10);
    }
  }
}
