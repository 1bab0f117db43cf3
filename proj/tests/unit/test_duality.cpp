#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dklab/duality/duality.hpp"
#include "oracles.hpp"

using namespace dklab;

TEST_CASE("single-particle right-hand side equals wrapped heat-kernel quadrature", "[duality][oracle]") {
  // alpha = 1: exp(-V_t f(x)) = E exp(-f(x + B_t)), B_t of variance t
  const EmpiricalMeasure mu({0.5});
  for (const auto& f : default_test_functions()) {
    for (double t : {0.02, 0.1}) {
      const double quad = oracle::wrapped_heat([&](double y) { return std::exp(-f(y)); }, 0.5, t);
      CHECK(duality_rhs(mu, f, 1.0, t) == Catch::Approx(quad).margin(1e-10));
    }
  }
}

TEST_CASE("Monte Carlo agrees with the dual side", "[duality]") {
  const auto fs = default_test_functions();
  const auto rep = run_duality_test(2.0, EmpiricalMeasure::evenly_spaced(2), fs[1], 0.05, 20000, 99);
  CHECK(std::abs(rep.z_score) < 4.0);
  CHECK(rep.mc_stderr > 0.0);
  const auto plain = run_duality_test(1.0, EmpiricalMeasure({0.5}), fs[0], 0.05, 20000, 5, {false, 0, 256, 3.0});
  CHECK(std::abs(plain.z_score) < 4.0);
}

TEST_CASE("degenerate estimators compare to round-off", "[duality]") {
  const auto rep = run_duality_test(1.0, EmpiricalMeasure({0.3}), FourierFunction::constant(0.7), 0.05, 10, 1);
  CHECK(rep.mc_stderr == 0.0);
  CHECK(rep.pass);
  CHECK_THROWS_AS(run_duality_test(1.5, EmpiricalMeasure({0.3}), FourierFunction::constant(0.7), 0.05, 10, 1),
                  std::domain_error);
}

TEST_CASE("sweeps are deterministic and thread-invariant", "[duality][determinism]") {
  const std::vector<std::size_t> alphas{1, 3};
  const std::vector<double> times{0.02};
  const auto fs = default_test_functions();
  DualityOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = sweep(alphas, times, fs, 2000, 17, one);
  const auto b = sweep(alphas, times, fs, 2000, 17, four);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mc_mean == b[i].mc_mean);
    CHECK(a[i].mc_stderr == b[i].mc_stderr);
    CHECK(a[i].f_id == i % 3);
  }
  CHECK(a[0].seed != a[1].seed);
}
