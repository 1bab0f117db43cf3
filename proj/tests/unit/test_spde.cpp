#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/spde/density_field.hpp"

using namespace dklab;

TEST_CASE("stability bound is enforced at configuration time", "[spde]") {
  const double bound = SpdeConfig::stability_bound(64, 1.5);
  const SpdeConfig cfg{1.5, 1.0};
  RngStream s(1, 0);
  CHECK_NOTHROW(step(DensityField::uniform(64, bound), cfg, s));
  CHECK_THROWS_AS(step(DensityField::uniform(64, 1.01 * bound), cfg, s), std::invalid_argument);
  CHECK_THROWS_AS(first_negativity(DensityField::uniform(64, 2 * bound), cfg, 10, s), std::invalid_argument);
}

TEST_CASE("flux form conserves mass to round-off", "[spde][property]") {
  const std::size_t cells = 128;
  const auto f0 = DensityField::from_function(cells, 0.5 * SpdeConfig::stability_bound(cells, 2.0),
                                              FourierFunction(1.0, {0.3}, {0.2}));
  RngStream s(3, 0);
  auto f = f0;
  for (int i = 0; i < 200; ++i) {
    f = step(f, {2.0, 0.05}, s);
    CHECK(std::abs(f.mass() - f0.mass()) <= 1e-12 * f0.mass());
  }
  CHECK(f.step_count == 200);
}

TEST_CASE("one step from the constant density has the stencil variance", "[spde][oracle]") {
  // Var = 2 dt / dx^3 from two independent interface fluxes of variance dt / dx each
  const std::size_t cells = 64;
  const double dx = 1.0 / cells;
  const double dt = 0.5 * SpdeConfig::stability_bound(cells, 1.0);
  const auto f0 = DensityField::uniform(cells, dt);
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; n < 1000000; ++r) {
    RngStream s(12, r);
    const auto f = step(f0, {1.0, 1.0}, s);
    for (double v : f.cell_values) {
      sum += v;
      sum2 += (v - 1.0) * (v - 1.0);
      ++n;
    }
  }
  const double expected = 2.0 * dt / (dx * dx * dx);
  CHECK(sum / n == Catch::Approx(1.0).margin(1e-12));  // mass is conserved per field
  // sum of squares of Gaussians: relative SE about sqrt(2/n) (inflated for neighbour correlation)
  CHECK(sum2 / n == Catch::Approx(expected).epsilon(8.0 * std::sqrt(2.0 / n)));
}

TEST_CASE("zero noise reduces to the heat equation", "[spde][oracle]") {
  const std::size_t cells = 128;
  const double alpha = 1.0;
  const double dt = 0.25 * SpdeConfig::stability_bound(cells, alpha);
  const FourierFunction mu0(1.0, {0.5}, {});
  const auto f0 = DensityField::from_function(cells, dt, mu0);
  RngStream s(0, 0);
  const std::size_t steps = 2000;
  const auto f = evolve(f0, {alpha, 0.0}, steps, s);
  const double t = dt * steps;
  const auto exact = heat_semigroup(mu0, alpha, t);
  double worst = 0.0;
  for (std::size_t j = 0; j < cells; ++j) worst = std::max(worst, std::abs(f.cell_values[j] - exact((j + 0.5) / cells)));
  const double dx = 1.0 / cells;
  CHECK(worst < 5.0 * (dx * dx + dt) * 0.5 * std::pow(kTwoPi, 2));
  CHECK_FALSE(first_negativity(f0, {alpha, 0.0}, 5000, s));
}

TEST_CASE("same seed gives the same trajectory", "[spde][determinism]") {
  const auto f0 = DensityField::uniform(32, 0.5 * SpdeConfig::stability_bound(32, 1.5));
  RngStream a(5, 1), b(5, 1);
  CHECK(evolve(f0, {1.5, 0.01}, 50, a).cell_values == evolve(f0, {1.5, 0.01}, 50, b).cell_values);
  const auto r1 = breakdown_ensemble(f0, {1.5, 0.01}, 2000, 8, 4, 1);
  const auto r4 = breakdown_ensemble(f0, {1.5, 0.01}, 2000, 8, 4, 4);
  CHECK(r1.median_step == r4.median_step);
  CHECK(r1.negative == r4.negative);
}

TEST_CASE("weaker noise does not hasten negativity", "[spde][property]") {
  const std::size_t cells = 64;
  const auto f0 = DensityField::uniform(cells, 0.5 * SpdeConfig::stability_bound(cells, 1.5));
  double previous = 0.0;
  for (double lambda : {1.0, 0.1, 0.02}) {
    const auto rep = breakdown_ensemble(f0, {1.5, lambda}, 4000, 40, 21);
    CHECK(rep.median_step >= previous);
    previous = rep.median_step;
  }
}
