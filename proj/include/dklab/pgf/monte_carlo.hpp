#pragma once

// Empirical law of X = alpha mu_t(A) over simulated particle solutions, for
// comparison with the extracted coefficients.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dklab/core/parallel.hpp"
#include "dklab/core/rng.hpp"
#include "dklab/particles/particle_system.hpp"
#include "dklab/pgf/extract.hpp"
#include "dklab/pgf/occupation.hpp"

namespace dklab {

struct MonteCarloPgf {
  PgfExpansion expansion;            // frequencies with standard errors
  std::vector<std::size_t> counts;   // histogram over {0, ..., alpha}
  std::size_t replicates = 0;
  std::size_t non_integer_samples = 0;  // values of alpha mu_t(A) off the integers
  std::size_t out_of_range_samples = 0;
};

/// A is the exact union of arcs held by `occ`; the particles run for occ.t()
/// and occ.diffusivity() must equal alpha.
inline MonteCarloPgf monte_carlo_pgf(double alpha, const EmpiricalMeasure& mu0, const OccupationFunction& occ,
                                     std::size_t replicates, std::uint64_t seed, unsigned threads = 0) {
  const std::size_t n = checked_particle_count(alpha, mu0);
  if (occ.diffusivity() != alpha) {
    throw std::invalid_argument("monte_carlo_pgf: occupation function must use diffusivity alpha");
  }
  if (replicates == 0) throw std::invalid_argument("monte_carlo_pgf: need at least one replicate");
  const double atom_mass = alpha / static_cast<double>(n);  // alpha * (1/n)
  std::vector<double> values(replicates);
  parallel_for(replicates, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto mu_t = sample_marginal(mu0, alpha, occ.t(), RngStream(seed, replicate_stream_id(r)));
      double x = 0.0;
      for (double pos : mu_t.positions()) x += occ.contains(pos) ? atom_mass : 0.0;
      values[r] = x;
    }
  });
  MonteCarloPgf out;
  out.replicates = replicates;
  out.counts.assign(n + 1, 0);
  for (double x : values) {
    if (x != std::floor(x)) {
      ++out.non_integer_samples;
      continue;
    }
    if (x < 0.0 || x > alpha) {
      ++out.out_of_range_samples;
      continue;
    }
    ++out.counts[static_cast<std::size_t>(x)];
  }
  auto& e = out.expansion;
  e.method = PgfMethod::monte_carlo;
  e.requested_order = n;
  const double total = static_cast<double>(replicates);
  for (std::size_t k = 0; k <= n; ++k) {
    const double pk = static_cast<double>(out.counts[k]) / total;
    e.coefficients.push_back(pk);
    e.uncertainty.push_back(std::sqrt(pk * (1.0 - pk) / total));
  }
  return out;
}

}  // namespace dklab
