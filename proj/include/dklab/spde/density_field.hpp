#pragma once

// Naive explicit finite-volume integrator for
//
//   d_t mu = (alpha/2) mu'' + div(sqrt(mu) W),   W space-time white noise,
//
// on the unit torus. It is not a convergent scheme for anything (for non-integer
// alpha and a density initial condition there is no solution to converge to);
// its outputs are breakdown statistics, namely when a cell first goes negative.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/parallel.hpp"
#include "dklab/core/rng.hpp"
#include "dklab/core/torus.hpp"

namespace dklab {

struct DensityField {
  std::vector<double> cell_values;  // mass per unit length
  double dt = 0.0;
  std::size_t step_count = 0;

  [[nodiscard]] std::size_t cells() const noexcept { return cell_values.size(); }
  [[nodiscard]] double spacing() const noexcept { return 1.0 / static_cast<double>(cell_values.size()); }
  [[nodiscard]] double mass() const { return ordered_sum(cell_values) * spacing(); }

  static DensityField uniform(std::size_t cells, double dt, double level = 1.0) {
    return {std::vector<double>(cells, level), dt, 0};
  }

  /// Cell averages of a smooth density (sampled at cell midpoints).
  static DensityField from_function(std::size_t cells, double dt, const FourierFunction& density) {
    DensityField f{std::vector<double>(cells), dt, 0};
    for (std::size_t j = 0; j < cells; ++j) f.cell_values[j] = density((static_cast<double>(j) + 0.5) / static_cast<double>(cells));
    return f;
  }
};

struct SpdeConfig {
  double alpha = 1.0;
  double noise_scale = 1.0;  // 0 gives the heat equation, < 1 damps the flux

  /// Diffusive stability bound dt <= dx^2 / alpha for the explicit scheme.
  [[nodiscard]] static double stability_bound(std::size_t cells, double alpha) {
    const double dx = 1.0 / static_cast<double>(cells);
    return dx * dx / alpha;
  }

  void validate(const DensityField& field) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("spde: alpha must be positive");
    if (!(noise_scale >= 0.0)) throw std::invalid_argument("spde: noise_scale must be nonnegative");
    if (field.cells() < 3) throw std::invalid_argument("spde: need at least 3 cells");
    const double bound = stability_bound(field.cells(), alpha);
    if (!(field.dt > 0.0) || field.dt > bound) {
      throw std::invalid_argument("spde: dt = " + std::to_string(field.dt) + " violates the stability bound dt <= dx^2/alpha = " +
                                  std::to_string(bound));
    }
  }
};

namespace detail {

// One explicit Euler step; `flux` is scratch of size cells (interface j+1/2 at index j).
inline void advance(DensityField& f, const SpdeConfig& cfg, RngStream& stream, std::vector<double>& flux) {
  const std::size_t n = f.cells();
  const double dx = f.spacing();
  const double diff = 0.5 * cfg.alpha * f.dt;  // time-integrated diffusive flux per unit gradient
  const double noise = cfg.noise_scale * std::sqrt(f.dt / dx);
  auto& mu = f.cell_values;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = j + 1 == n ? 0 : j + 1;
    double g = -diff * (mu[k] - mu[j]) / dx;
    if (noise > 0.0) g += noise * std::sqrt(std::max(0.5 * (mu[j] + mu[k]), 0.0)) * stream.normal();
    flux[j] = g;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t left = j == 0 ? n - 1 : j - 1;
    mu[j] -= (flux[j] - flux[left]) / dx;
  }
  ++f.step_count;
}

}  // namespace detail

inline DensityField step(const DensityField& field, const SpdeConfig& cfg, RngStream& stream) {
  cfg.validate(field);
  DensityField next = field;
  std::vector<double> flux(field.cells());
  detail::advance(next, cfg, stream, flux);
  return next;
}

inline DensityField evolve(const DensityField& field, const SpdeConfig& cfg, std::size_t steps, RngStream& stream) {
  cfg.validate(field);
  DensityField f = field;
  std::vector<double> flux(field.cells());
  for (std::size_t s = 0; s < steps; ++s) detail::advance(f, cfg, stream, flux);
  return f;
}

struct NegativityEvent {
  std::size_t step = 0;  // 1-based step after which the cell is negative
  std::size_t cell = 0;
  double value = 0.0;
};

inline std::optional<NegativityEvent> first_negativity(const DensityField& field0, const SpdeConfig& cfg,
                                                       std::size_t max_steps, RngStream& stream) {
  cfg.validate(field0);
  for (std::size_t j = 0; j < field0.cells(); ++j) {
    if (field0.cell_values[j] < 0.0) return NegativityEvent{0, j, field0.cell_values[j]};
  }
  DensityField f = field0;
  std::vector<double> flux(f.cells());
  for (std::size_t s = 1; s <= max_steps; ++s) {
    detail::advance(f, cfg, stream, flux);
    for (std::size_t j = 0; j < f.cells(); ++j) {
      if (f.cell_values[j] < 0.0) return NegativityEvent{s, j, f.cell_values[j]};
    }
  }
  return std::nullopt;
}

struct BreakdownReport {
  std::size_t members = 0;
  std::size_t max_steps = 0;
  std::size_t negative = 0;  // members with a negative cell within max_steps
  std::vector<std::optional<NegativityEvent>> events;
  /// Median first-negativity step, counting survivors as max_steps + 1.
  double median_step = 0.0;
};

/// Member m runs on RngStream(seed, m).
inline BreakdownReport breakdown_ensemble(const DensityField& field0, const SpdeConfig& cfg, std::size_t max_steps,
                                          std::size_t members, std::uint64_t seed, unsigned threads = 0) {
  cfg.validate(field0);
  BreakdownReport rep;
  rep.members = members;
  rep.max_steps = max_steps;
  rep.events.resize(members);
  parallel_for(members, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      RngStream stream(seed, m);
      rep.events[m] = first_negativity(field0, cfg, max_steps, stream);
    }
  });
  std::vector<double> steps;
  steps.reserve(members);
  for (const auto& e : rep.events) {
    if (e) ++rep.negative;
    steps.push_back(e ? static_cast<double>(e->step) : static_cast<double>(max_steps + 1));
  }
  if (!steps.empty()) {
    std::sort(steps.begin(), steps.end());
    const std::size_t mid = steps.size() / 2;
    rep.median_step = steps.size() % 2 ? steps[mid] : 0.5 * (steps[mid - 1] + steps[mid]);
  }
  return rep;
}

}  // namespace dklab
