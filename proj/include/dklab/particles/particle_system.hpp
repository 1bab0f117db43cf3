#pragma once

// Empirical-measure solutions mu_t = (1/n) sum_i delta_{X^i_{n t}} where the X^i
// are independent Brownian motions on the torus with generator (1/2) d^2/dx^2,
// together with the martingale functional M_t(phi) and its compensator.
//
// Brownian marginals are exact at the stored grid times; the only
// discretisation is the trapezoid rule in the time integrals, whose error is
// O((t / num_steps)^2).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/parallel.hpp"
#include "dklab/core/rng.hpp"
#include "dklab/particles/empirical_measure.hpp"

namespace dklab {

/// Validates that `alpha` is the particle count of mu0. Only alpha = n with n
/// atoms of weight 1/n has a solution; anything else is refused.
inline std::size_t checked_particle_count(double alpha, const EmpiricalMeasure& mu0) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha != std::floor(alpha)) {
    throw std::domain_error("alpha = " + std::to_string(alpha) +
                            " is not a positive integer: the martingale problem has no solution to sample "
                            "(solutions exist only for alpha = n with n atoms of weight 1/n)");
  }
  if (static_cast<double>(mu0.size()) != alpha) {
    throw std::invalid_argument("alpha = " + std::to_string(alpha) + " but the initial measure has " +
                                std::to_string(mu0.size()) + " atoms; alpha must equal the atom count");
  }
  return mu0.size();
}

struct ParticlePath {
  std::vector<double> times;
  std::vector<EmpiricalMeasure> states;
  std::size_t alpha = 0;
  /// Unwrapped displacement of each particle at the final time.
  std::vector<double> displacement;
};

/// Simulates the empirical-measure solution on `num_steps` uniform steps of
/// [0, t_final]. Particle i draws from base.substream(i); `negate` flips every
/// Gaussian increment (antithetic partner, same law).
inline ParticlePath simulate_path(const EmpiricalMeasure& mu0, double alpha, double t_final, std::size_t num_steps,
                                  const RngStream& base, bool negate = false) {
  const std::size_t n = checked_particle_count(alpha, mu0);
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw std::domain_error("simulate_path: t_final must be >= 0");
  ParticlePath path;
  path.alpha = n;
  path.displacement.assign(n, 0.0);
  if (t_final == 0.0) {
    path.times = {0.0};
    path.states = {mu0};
    return path;
  }
  if (num_steps == 0) throw std::invalid_argument("simulate_path: num_steps must be positive");

  const double dt = t_final / static_cast<double>(num_steps);
  const double step_sd = std::sqrt(static_cast<double>(n) * dt);  // internal clock runs n times faster
  const double sign = negate ? -1.0 : 1.0;
  std::vector<std::vector<double>> positions(num_steps + 1, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    RngStream stream = base.substream(i);
    const double x0 = mu0.positions()[i];
    double unwrapped = x0;
    positions[0][i] = x0;
    for (std::size_t s = 1; s <= num_steps; ++s) {
      unwrapped += sign * step_sd * stream.normal();
      positions[s][i] = wrap_unit(unwrapped);
    }
    path.displacement[i] = unwrapped - x0;
  }
  path.times.resize(num_steps + 1);
  path.states.reserve(num_steps + 1);
  for (std::size_t s = 0; s <= num_steps; ++s) {
    path.times[s] = (s == num_steps) ? t_final : dt * static_cast<double>(s);
    path.states.emplace_back(std::move(positions[s]));
  }
  return path;
}

/// The law of mu_t alone: one exact Gaussian step per particle. Identical to the
/// last state of simulate_path(..., num_steps = 1, ...).
inline EmpiricalMeasure sample_marginal(const EmpiricalMeasure& mu0, double alpha, double t, const RngStream& base,
                                        bool negate = false) {
  const std::size_t n = checked_particle_count(alpha, mu0);
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("sample_marginal: t must be >= 0");
  if (t == 0.0) return mu0;
  const double sd = std::sqrt(static_cast<double>(n) * t);
  const double sign = negate ? -1.0 : 1.0;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream stream = base.substream(i);
    xs[i] = mu0.positions()[i] + sign * sd * stream.normal();
  }
  return EmpiricalMeasure(std::move(xs));
}

struct MartingaleSample {
  FourierFunction phi;
  std::vector<double> times;
  std::vector<double> m_values;     // M_t(phi)
  std::vector<double> qv_integral;  // int_0^t <mu_s, Gamma phi> ds
};

/// M_t(phi) = <mu_t, phi> - <mu_0, phi> - (alpha/2) int_0^t <mu_s, L phi> ds along
/// the stored grid, with both time integrals by the trapezoid rule.
inline MartingaleSample martingale_functional(const ParticlePath& path, const FourierFunction& phi) {
  const std::size_t levels = path.states.size();
  MartingaleSample out{phi, path.times, std::vector<double>(levels, 0.0), std::vector<double>(levels, 0.0)};
  if (levels == 0) return out;
  std::vector<double> pair_phi(levels), pair_lphi(levels), pair_gamma(levels);
  for (std::size_t s = 0; s < levels; ++s) {
    double v = 0.0, l = 0.0, g = 0.0;
    for (double x : path.states[s].positions()) {
      const Jet j = phi.jet(x);
      v += j.value;
      l += j.second;
      g += j.first * j.first;
    }
    const double inv_n = 1.0 / static_cast<double>(path.states[s].size());
    pair_phi[s] = v * inv_n;
    pair_lphi[s] = l * inv_n;
    pair_gamma[s] = g * inv_n;
  }
  const double half_alpha = 0.5 * static_cast<double>(path.alpha);
  double drift = 0.0;
  double qv = 0.0;
  for (std::size_t s = 1; s < levels; ++s) {
    const double dt = path.times[s] - path.times[s - 1];
    drift += 0.5 * dt * (pair_lphi[s] + pair_lphi[s - 1]);
    qv += 0.5 * dt * (pair_gamma[s] + pair_gamma[s - 1]);
    out.m_values[s] = pair_phi[s] - pair_phi[0] - half_alpha * drift;
    out.qv_integral[s] = qv;
  }
  return out;
}

struct QvReport {
  std::size_t replicates = 0;
  double mean_m = 0.0;
  double stderr_m = 0.0;
  double z_mean = 0.0;  // mean_m / stderr_m
  double mean_m2 = 0.0;
  double stderr_m2 = 0.0;
  double mean_qv = 0.0;
  double stderr_qv = 0.0;
  double stderr_diff = 0.0;  // standard error of mean(M^2 - qv), replicate-paired
  double z_qv = 0.0;

  [[nodiscard]] bool passes(double sigmas = 3.0) const { return std::abs(z_mean) <= sigmas && std::abs(z_qv) <= sigmas; }
};

namespace detail {
inline double z_score(double diff, double se) {
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}
}  // namespace detail

/// Replicate statistics of M_t and of M_t^2 against the claimed quadratic
/// variation at one time. Both z-scores should be O(1) if the claims hold.
inline QvReport qv_statistic(std::span<const double> m_values, std::span<const double> qv_values) {
  if (m_values.size() != qv_values.size()) throw std::invalid_argument("qv_statistic: size mismatch");
  if (m_values.size() < 100) throw std::invalid_argument("qv_statistic: needs at least 100 replicates");
  const std::size_t r = m_values.size();
  std::vector<double> m2(r), diff(r);
  for (std::size_t i = 0; i < r; ++i) {
    m2[i] = m_values[i] * m_values[i];
    diff[i] = m2[i] - qv_values[i];
  }
  const auto sm = summarize(m_values);
  const auto sm2 = summarize(m2);
  const auto sqv = summarize(qv_values);
  const auto sd = summarize(diff);
  QvReport rep;
  rep.replicates = r;
  rep.mean_m = sm.mean;
  rep.stderr_m = sm.stderr_mean;
  rep.z_mean = detail::z_score(sm.mean, sm.stderr_mean);
  rep.mean_m2 = sm2.mean;
  rep.stderr_m2 = sm2.stderr_mean;
  rep.mean_qv = sqv.mean;
  rep.stderr_qv = sqv.stderr_mean;
  rep.stderr_diff = sd.stderr_mean;
  rep.z_qv = detail::z_score(sm2.mean - sqv.mean, sd.stderr_mean);
  return rep;
}

/// Statistics at `time_index` (default: last grid time) of an ensemble.
inline QvReport qv_statistic(std::span<const MartingaleSample> ensemble,
                             std::size_t time_index = std::numeric_limits<std::size_t>::max()) {
  std::vector<double> m, qv;
  m.reserve(ensemble.size());
  qv.reserve(ensemble.size());
  for (const auto& s : ensemble) {
    const std::size_t idx = std::min(time_index, s.m_values.size() - 1);
    m.push_back(s.m_values.at(idx));
    qv.push_back(s.qv_integral.at(idx));
  }
  return qv_statistic(m, qv);
}

struct MartingaleCheckpoint {
  std::size_t phi_index = 0;
  double t = 0.0;
  QvReport report;
};

/// Runs `replicates` independent paths (replicate r uses stream ids r * 2^32 + i)
/// and reports M_t / QV statistics for every phi at the requested grid indices.
inline std::vector<MartingaleCheckpoint> martingale_ensemble(const EmpiricalMeasure& mu0, double alpha,
                                                             double t_final, std::size_t num_steps,
                                                             std::span<const FourierFunction> phis,
                                                             std::span<const std::size_t> checkpoints,
                                                             std::size_t replicates, std::uint64_t seed,
                                                             unsigned threads = 0) {
  checked_particle_count(alpha, mu0);
  for (auto c : checkpoints) {
    if (c == 0 || c > num_steps) throw std::invalid_argument("martingale_ensemble: checkpoint outside (0, num_steps]");
  }
  const std::size_t slots = phis.size() * checkpoints.size();
  std::vector<double> m(slots * replicates), qv(slots * replicates);
  parallel_for(replicates, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const RngStream base(seed, replicate_stream_id(r));
      const ParticlePath path = simulate_path(mu0, alpha, t_final, num_steps, base);
      for (std::size_t p = 0; p < phis.size(); ++p) {
        const MartingaleSample sample = martingale_functional(path, phis[p]);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
          const std::size_t slot = p * checkpoints.size() + c;
          m[slot * replicates + r] = sample.m_values[checkpoints[c]];
          qv[slot * replicates + r] = sample.qv_integral[checkpoints[c]];
        }
      }
    }
  });
  std::vector<MartingaleCheckpoint> out;
  out.reserve(slots);
  const double dt = t_final / static_cast<double>(num_steps);
  for (std::size_t p = 0; p < phis.size(); ++p) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const std::size_t slot = p * checkpoints.size() + c;
      const std::span<const double> ms(m.data() + slot * replicates, replicates);
      const std::span<const double> qs(qv.data() + slot * replicates, replicates);
      const double t = checkpoints[c] == num_steps ? t_final : dt * static_cast<double>(checkpoints[c]);
      out.push_back({p, t, qv_statistic(ms, qs)});
    }
  }
  return out;
}

}  // namespace dklab
