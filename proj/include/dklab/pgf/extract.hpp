#pragma once

// Coefficient extraction for generating functions g(s) = sum_k p_k s^k + o(s^n).
//
// Two independent routes:
//  * series composition: ln then exp of truncated power series, exact up to
//    rounding in 113-bit arithmetic;
//  * limit extraction: p_n as the limit of (g(s) - sum_{k<n} p_k s^k) / s^n on a
//    geometric grid s_j = s0 2^-j. The limit is accelerated by Richardson
//    extrapolation and accepted once three consecutive changes are below
//    tolerance * max(1, |p_n|). If the raw remainders instead grow by a factor
//    >= 2 over three consecutive levels the expansion is flagged as not o(s^n).
//    Failure to stabilize is a PrecisionError when the changes are within the
//    propagated rounding bound, and a divergence flag otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dklab/pgf/generating.hpp"
#include "dklab/pgf/occupation.hpp"
#include "dklab/pgf/series.hpp"

namespace dklab {

enum class PgfMethod { series_composition, limit_extraction, monte_carlo };

inline const char* to_string(PgfMethod m) {
  switch (m) {
    case PgfMethod::series_composition: return "series-composition";
    case PgfMethod::limit_extraction: return "limit-extraction";
    case PgfMethod::monte_carlo: return "monte-carlo";
  }
  return "?";
}

struct DivergenceFlag {
  std::size_t order = 0;
  double growth = 0.0;  // |r| ratio across the detection window
};

struct NegativityFlag {
  std::size_t order = 0;
  double value = 0.0;
};

struct PgfExpansion {
  PgfMethod method = PgfMethod::series_composition;
  std::size_t requested_order = 0;
  std::vector<double> coefficients;  // p_0 .. p_m (m may stop early on a flag)
  std::vector<double> uncertainty;   // per-coefficient error estimate / standard error
  std::optional<DivergenceFlag> divergence;
  std::optional<NegativityFlag> negativity;

  [[nodiscard]] double mass_up_to(std::size_t k) const {
    double m = 0.0;
    for (std::size_t i = 0; i <= k && i < coefficients.size(); ++i) m += coefficients[i];
    return m;
  }
};

/// Raised instead of returning a coefficient that rounding has destroyed.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(std::size_t order, std::size_t usable_levels, double noise_floor)
      : std::runtime_error(message(order, usable_levels, noise_floor)),
        order_(order),
        usable_levels_(usable_levels),
        noise_floor_(noise_floor) {}

  [[nodiscard]] std::size_t order() const noexcept { return order_; }
  [[nodiscard]] std::size_t usable_levels() const noexcept { return usable_levels_; }
  [[nodiscard]] double noise_floor() const noexcept { return noise_floor_; }

 private:
  static std::string message(std::size_t order, std::size_t usable, double noise) {
    std::ostringstream os;
    os << "coefficient extraction aborted at order " << order << ": rounding noise " << noise << " over " << usable
       << " usable grid levels exceeds the stabilization tolerance";
    return os.str();
  }

  std::size_t order_;
  std::size_t usable_levels_;
  double noise_floor_;
};

inline constexpr std::size_t kMaxSeriesOrder = 64;
inline constexpr double kSeriesNegativityTol = 1e-10;

/// Degree-K Taylor coefficients of exp(alpha sum_i w_i [ln(1 - h_i) + ln(1 + s h_i / (1 - h_i))]).
inline PgfExpansion extract_coefficients_series(const GeneratingFunction& g, std::size_t order) {
  if (order > kMaxSeriesOrder) {
    throw std::invalid_argument("extract_coefficients_series: order " + std::to_string(order) + " exceeds " +
                                std::to_string(kMaxSeriesOrder));
  }
  FormalSeries<Extended> log_g(order);
  const auto hs = g.h_at_atoms();
  const auto es = g.exponents();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Extended h(hs[i]);
    auto term = FormalSeries<Extended>::log1p_linear(h / (1 - h), order);
    term[0] += boost::multiprecision::log1p(-h);
    term *= Extended(es[i]);
    log_g += term;
  }
  const auto p = log_g.exp();
  PgfExpansion out;
  out.method = PgfMethod::series_composition;
  out.requested_order = order;
  out.coefficients.resize(order + 1);
  out.uncertainty.assign(order + 1, 0.0);
  for (std::size_t k = 0; k <= order; ++k) {
    out.coefficients[k] = static_cast<double>(p[k]);
    if (!out.negativity && out.coefficients[k] < -kSeriesNegativityTol) out.negativity = NegativityFlag{k, out.coefficients[k]};
  }
  return out;
}

inline PgfExpansion extract_coefficients_series(double alpha, const WeightedAtoms& mu0, const OccupationFunction& occ,
                                                std::size_t order) {
  return extract_coefficients_series(build_g(alpha, mu0, occ), order);
}

struct LimitGrid {
  double s0 = 1.0 / 16.0;
  std::size_t levels = 64;
  double stabilization_tol = 1e-7;  // relative to max(1, |p_n|)
  double growth_factor = 2.0;
  std::size_t window = 3;
  double noise_fraction = 0.1;  // a level is usable if its noise is below this share of |remainder| ...
  double noise_floor = 1e-9;    // ... or below this absolute level
  std::size_t richardson_columns = 8;
};

inline PgfExpansion extract_coefficients_limit(const ExtendedEvaluator& g, std::size_t order, const LimitGrid& grid = {}) {
  if (!(grid.s0 > 0.0) || grid.levels < grid.window + 2) throw std::invalid_argument("extract_coefficients_limit: bad grid");
  using boost::multiprecision::abs;
  const Extended eps = std::numeric_limits<Extended>::epsilon();
  const std::size_t levels = grid.levels;
  std::vector<Extended> s(levels), gs(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    s[j] = Extended(std::ldexp(grid.s0, -static_cast<int>(j)));
    gs[j] = g(s[j]);
  }

  PgfExpansion out;
  out.method = PgfMethod::limit_extraction;
  out.requested_order = order;
  std::vector<Extended> p;    // accepted coefficients
  std::vector<Extended> err;  // their error estimates

  for (std::size_t n = 0; n <= order; ++n) {
    // rescaled remainders and their rounding / propagated-error floor
    std::vector<Extended> r(levels), noise_at(levels);
    std::size_t usable = 0;
    Extended last_noise = 0;
    for (std::size_t j = 0; j < levels; ++j) {
      Extended sn = 1;
      for (std::size_t k = 0; k < n; ++k) sn *= s[j];
      Extended acc = gs[j];
      Extended magnitude = abs(gs[j]);
      Extended propagated = 0;
      Extended sk = 1;
      for (std::size_t k = 0; k < n; ++k) {
        acc -= p[k] * sk;
        magnitude += abs(p[k] * sk);
        propagated += err[k] * sk;
        sk *= s[j];
      }
      r[j] = acc / sn;
      const Extended noise = (8 * eps * magnitude + propagated) / sn;
      noise_at[j] = noise;
      const bool ok = noise <= Extended(grid.noise_fraction) * abs(r[j]) || noise <= Extended(grid.noise_floor);
      if (!ok) break;
      usable = j + 1;
      last_noise = noise;
    }
    if (usable < grid.window + 1) throw PrecisionError(n, usable, static_cast<double>(last_noise));

    // divergence: |r| strictly increasing over the last `window` transitions by >= growth_factor,
    // judged only where r is well above its rounding noise (noise alone also grows like s^-n)
    {
      const std::size_t last = usable - 1;
      const std::size_t first = last - grid.window;
      bool increasing = true;
      for (std::size_t j = first; j <= last; ++j) {
        increasing = increasing && noise_at[j] <= Extended(grid.noise_fraction) * abs(r[j]);
      }
      for (std::size_t j = first + 1; j <= last; ++j) increasing = increasing && abs(r[j]) > abs(r[j - 1]);
      const Extended base = abs(r[first]);
      if (increasing && base > 0 && abs(r[last]) >= Extended(grid.growth_factor) * base) {
        out.divergence = DivergenceFlag{n, static_cast<double>(abs(r[last]) / base)};
        break;
      }
    }

    // Richardson extrapolation in s -> 0 (error expansion in integer powers of s)
    // (bounds[j][m] carries the rounding-noise bound through the same recurrence)
    std::vector<std::vector<Extended>> table(usable), bounds(usable);
    std::vector<Extended> x(usable), x_noise(usable);
    for (std::size_t j = 0; j < usable; ++j) {
      table[j].push_back(r[j]);
      bounds[j].push_back(noise_at[j]);
      const std::size_t cols = std::min(j, grid.richardson_columns);
      for (std::size_t m = 1; m <= cols; ++m) {
        const Extended denom = Extended(std::ldexp(1.0, static_cast<int>(m)) - 1.0);
        table[j].push_back(table[j][m - 1] + (table[j][m - 1] - table[j - 1][m - 1]) / denom);
        bounds[j].push_back(bounds[j][m - 1] + (bounds[j][m - 1] + bounds[j - 1][m - 1]) / denom);
      }
      x[j] = table[j].back();
      x_noise[j] = bounds[j].back();
    }
    // pick the level whose trailing window of changes is smallest; accept if under tolerance
    std::optional<std::size_t> best;
    Extended best_change = 0;
    for (std::size_t j = grid.window; j < usable; ++j) {
      Extended worst = 0;
      for (std::size_t i = j + 1 - grid.window; i <= j; ++i) worst = std::max<Extended>(worst, abs(x[i] - x[i - 1]));
      if (!best || worst < best_change) {
        best = j;
        best_change = worst;
      }
    }
    const Extended scale = std::max<Extended>(Extended(1), abs(x[*best]));
    if (!(best_change <= Extended(grid.stabilization_tol) * scale)) {
      // changes no larger than the accumulated rounding: precision, not analyticity, ran out
      Extended window_noise = 0;
      for (std::size_t i = *best - grid.window; i <= *best; ++i) window_noise = std::max<Extended>(window_noise, x_noise[i]);
      if (best_change <= 4 * window_noise) throw PrecisionError(n, usable, static_cast<double>(window_noise));
      // neither converging nor growing geometrically: not o(s^n) at this resolution
      const Extended base = abs(r[usable - 1 - grid.window]);
      out.divergence = DivergenceFlag{n, base > 0 ? static_cast<double>(abs(r[usable - 1]) / base) : 0.0};
      break;
    }
    p.push_back(x[*best]);
    err.push_back(std::max<Extended>(best_change, 8 * eps * scale));
    out.coefficients.push_back(static_cast<double>(x[*best]));
    out.uncertainty.push_back(static_cast<double>(err.back()));
    if (!out.negativity && out.coefficients.back() < -(out.uncertainty.back() + kSeriesNegativityTol)) {
      out.negativity = NegativityFlag{n, out.coefficients.back()};
    }
  }
  return out;
}

}  // namespace dklab
