#pragma once

// Analytic properties of V_t f checked on the grid: the maximum/minimum
// principles and the gradient estimate (flat torus, so no curvature factor).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/spectral.hpp"
#include "dklab/core/rng.hpp"
#include "dklab/vhj/cole_hopf.hpp"

namespace dklab {

struct ExtremumReport {
  double inf_f = 0.0;
  double sup_f = 0.0;
  double inf_v = 0.0;
  double sup_v = 0.0;
  double lower_margin = 0.0;  // inf V_t f - inf f
  double upper_margin = 0.0;  // sup f - sup V_t f
  bool holds = false;
  bool strict = false;  // both margins positive
};

/// inf f <= inf V_t f and sup V_t f <= sup f, `slack` allowed on each side.
/// inf/sup of f are the true extrema of the trigonometric polynomial.
inline ExtremumReport check_extremum_principles(const VhjField& field, double slack = 1e-12) {
  const auto ef = extrema(field.initial(), 4 * field.domain().grid_size());
  const auto v = field.values();
  ExtremumReport r;
  r.inf_f = ef.min;
  r.sup_f = ef.max;
  r.inf_v = *std::min_element(v.begin(), v.end());
  r.sup_v = *std::max_element(v.begin(), v.end());
  r.lower_margin = r.inf_v - r.inf_f;
  r.upper_margin = r.sup_f - r.sup_v;
  r.holds = r.lower_margin >= -slack && r.upper_margin >= -slack;
  r.strict = r.lower_margin > 0.0 && r.upper_margin > 0.0;
  return r;
}

struct GradientReport {
  double max_gamma_v = 0.0;  // sup_grid |(V_t f)'|^2
  double sup_gamma_f = 0.0;  // ||Gamma f||_inf
  double diam_f = 0.0;       // sup f - inf f
  double bound = 0.0;        // e^{(2/alpha) diam f} ||Gamma f||_inf
  double margin = 0.0;       // bound - max_gamma_v
  bool holds = false;
  /// Intermediate form Gamma V_t f <= alpha^2 (P_t e^{-f/alpha})^{-2} P_t Gamma e^{-f/alpha}.
  double sharp_max_excess = 0.0;  // max over grid of lhs - rhs (<= 0 when it holds)
  double sharp_min_slack = 0.0;   // min over grid of rhs - lhs
  bool sharp_holds = false;
};

inline GradientReport check_gradient_estimate(const VhjField& field, double slack = 1e-8) {
  const auto& dom = field.domain();
  const auto& f = field.initial();
  const double alpha = field.alpha();
  GradientReport r;
  const auto ef = extrema(f, 4 * dom.grid_size());
  r.diam_f = ef.max - ef.min;
  r.sup_gamma_f = f.is_constant() ? 0.0 : std::pow(sup_norm(derivative(f)), 2);
  r.bound = std::exp(2.0 / alpha * r.diam_f) * r.sup_gamma_f;
  const auto gamma_v = field.gamma_values();
  r.max_gamma_v = *std::max_element(gamma_v.begin(), gamma_v.end());
  r.margin = r.bound - r.max_gamma_v;
  r.holds = r.margin >= -slack;

  if (field.trivial()) {
    // t = 0 or constant f: both sides of the intermediate form coincide
    r.sharp_holds = true;
    return r;
  }
  // P_t Gamma e^{-f/alpha}: (u0')^2 on the grid, projected, then propagated
  const auto [u0, err] = project_exponential(dom, f, alpha);
  (void)err;
  const FourierFunction du0 = derivative(u0);
  std::vector<double> sq = synthesize(dom, du0);
  for (auto& s : sq) s *= s;
  const FourierFunction pt_gamma = heat_semigroup(project(dom, sq), alpha, field.t());
  const auto ut = field.exp_transform();
  r.sharp_max_excess = -std::numeric_limits<double>::infinity();
  r.sharp_min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dom.grid_size(); ++j) {
    const double rhs = alpha * alpha * pt_gamma(dom.point(j)) / (ut[j] * ut[j]);
    r.sharp_max_excess = std::max(r.sharp_max_excess, gamma_v[j] - rhs);
    r.sharp_min_slack = std::min(r.sharp_min_slack, rhs - gamma_v[j]);
  }
  r.sharp_holds = r.sharp_max_excess <= slack;
  return r;
}

/// Random trig polynomial for the randomized suites: mean in (-1, 1) and
/// mode-k coefficients N(0, (scale/k)^2) for k <= max_mode.
inline FourierFunction random_test_function(RngStream& stream, std::size_t max_mode = 4, double scale = 1.0) {
  const double mean = 2.0 * stream.uniform() - 1.0;
  std::vector<double> cs(max_mode), ss(max_mode);
  for (std::size_t k = 1; k <= max_mode; ++k) {
    cs[k - 1] = scale / static_cast<double>(k) * stream.normal();
    ss[k - 1] = scale / static_cast<double>(k) * stream.normal();
  }
  return FourierFunction(mean, std::move(cs), std::move(ss));
}

}  // namespace dklab
