#pragma once

// Cole-Hopf solution of the viscous Hamilton-Jacobi equation
//
//   dv/dt = (alpha/2) v'' - (1/2) |v'|^2,   v(0) = f,
//
// given by V_t f = -alpha ln(P_t e^{-f/alpha}) with P_t the heat semigroup of
// (alpha/2) d^2/dx^2. e^{-f/alpha} is not a finite Fourier sum, so it is sampled
// on the grid and projected onto dom.max_resolved_mode() modes; the projection
// error is measured on a refined grid and stored with the field.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/spectral.hpp"
#include "dklab/core/torus.hpp"

namespace dklab {

class VhjField {
 public:
  VhjField(TorusDomain dom, FourierFunction f, double alpha, double t, FourierFunction exp_fourier,
           std::vector<double> exp_transform, std::vector<double> values, double projection_error)
      : dom_(dom),
        f_(std::move(f)),
        alpha_(alpha),
        t_(t),
        exp_fourier_(std::move(exp_fourier)),
        exp_transform_(std::move(exp_transform)),
        values_(std::move(values)),
        projection_error_(projection_error) {}

  [[nodiscard]] const TorusDomain& domain() const noexcept { return dom_; }
  [[nodiscard]] const FourierFunction& initial() const noexcept { return f_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double t() const noexcept { return t_; }
  /// V_t f on the grid.
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  /// P_t e^{-f/alpha} on the grid.
  [[nodiscard]] std::span<const double> exp_transform() const noexcept { return exp_transform_; }
  /// P_t e^{-f/alpha} as a Fourier sum.
  [[nodiscard]] const FourierFunction& exp_fourier() const noexcept { return exp_fourier_; }
  /// Max deviation of the projected e^{-f/alpha} from the exact one on a 2x refined grid.
  [[nodiscard]] double projection_error() const noexcept { return projection_error_; }

  [[nodiscard]] bool trivial() const noexcept { return t_ == 0.0 || f_.is_constant(); }

  /// V_t f(x) at an arbitrary point.
  [[nodiscard]] double value_at(double x) const {
    if (trivial()) return f_(x);
    return -alpha_ * std::log(exp_fourier_(x));
  }

  /// (V_t f)' and (V_t f)'' at x from u = P_t e^{-f/alpha}: v' = -alpha u'/u,
  /// v'' = -alpha (u''/u - (u'/u)^2).
  [[nodiscard]] Jet jet_at(double x) const {
    if (trivial()) return f_.jet(x);
    const Jet u = exp_fourier_.jet(x);
    const double r1 = u.first / u.value;
    return {-alpha_ * std::log(u.value), -alpha_ * r1, -alpha_ * (u.second / u.value - r1 * r1)};
  }

  /// Gamma V_t f = |(V_t f)'|^2 on the grid.
  [[nodiscard]] std::vector<double> gamma_values() const {
    std::vector<double> out(dom_.grid_size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double d = jet_at(dom_.point(j)).first;
      out[j] = d * d;
    }
    return out;
  }

  /// Grid values projected back to a Fourier sum (used to restart the flow).
  [[nodiscard]] FourierFunction to_fourier() const {
    if (trivial()) return f_;
    return project(dom_, values_);
  }

 private:
  TorusDomain dom_;
  FourierFunction f_;
  double alpha_;
  double t_;
  FourierFunction exp_fourier_;
  std::vector<double> exp_transform_;
  std::vector<double> values_;
  double projection_error_;
};

/// Projection of e^{-f/alpha} onto the grid's Fourier modes together with the
/// measured projection error.
inline std::pair<FourierFunction, double> project_exponential(const TorusDomain& dom, const FourierFunction& f,
                                                              double alpha) {
  const auto expo = [alpha](double v) { return std::exp(-v / alpha); };
  FourierFunction u0 = project_map(dom, f, expo);
  // midpoints are where interpolation error is largest
  double err = 0.0;
  const double h = dom.spacing();
  for (std::size_t j = 0; j < dom.grid_size(); ++j) {
    const double x = (static_cast<double>(j) + 0.5) * h;
    err = std::max(err, std::abs(u0(x) - expo(f(x))));
  }
  return {std::move(u0), err};
}

inline VhjField cole_hopf(const TorusDomain& dom, const FourierFunction& f, double alpha, double t) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("cole_hopf: alpha must be positive");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("cole_hopf: t must be nonnegative");
  if (f.is_constant()) {
    // constants are fixed points of P_t, hence of V_t
    const double u = std::exp(-f.mean() / alpha);
    return {dom, f, alpha, t, FourierFunction::constant(u), std::vector<double>(dom.grid_size(), u),
            std::vector<double>(dom.grid_size(), f.mean()), 0.0};
  }
  auto [u0, proj_err] = project_exponential(dom, f, alpha);
  FourierFunction ut = heat_semigroup(u0, alpha, t);
  std::vector<double> u = synthesize(dom, ut);
  std::vector<double> v(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!(u[j] > 0.0)) {
      throw std::domain_error("cole_hopf: P_t e^{-f/alpha} is not positive on the grid; grid too coarse for f/alpha");
    }
    v[j] = -alpha * std::log(u[j]);
  }
  if (t == 0.0) v = synthesize(dom, f);
  return {dom, f, alpha, t, std::move(ut), std::move(u), std::move(v), proj_err};
}

struct ResidualLevel {
  double dt = 0.0;
  double residual = 0.0;
  std::optional<double> observed_order;  // log2(residual(2 dt) / residual(dt))
};

/// sup over grid and interior time levels of
///   |dv/dt - (alpha/2) v'' + (1/2) |v'|^2|
/// with dv/dt by centred differences and the spatial terms spectral.
/// The family must share domain, datum and alpha and be uniform in t.
inline double vhj_residual(std::span<const VhjField> family) {
  if (family.size() < 3) throw std::invalid_argument("vhj_residual: need at least 3 time levels");
  const double dt = family[1].t() - family[0].t();
  if (!(dt > 0.0)) throw std::invalid_argument("vhj_residual: times must increase");
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (!(family[i].domain() == family[0].domain()) || family[i].alpha() != family[0].alpha()) {
      throw std::invalid_argument("vhj_residual: fields must share domain and alpha");
    }
    const double step = family[i].t() - family[i - 1].t();
    if (std::abs(step - dt) > 1e-9 * dt) throw std::invalid_argument("vhj_residual: time levels must be uniform");
  }
  const auto& dom = family[0].domain();
  const double alpha = family[0].alpha();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < family.size(); ++i) {
    const auto prev = family[i - 1].values();
    const auto next = family[i + 1].values();
    for (std::size_t j = 0; j < dom.grid_size(); ++j) {
      const Jet v = family[i].jet_at(dom.point(j));
      const double dvdt = (next[j] - prev[j]) / (2.0 * dt);
      const double r = dvdt - 0.5 * alpha * v.second + 0.5 * v.first * v.first;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

/// Residual at time t for dt0, dt0/2, ... (`levels` entries) and the observed
/// order of the centred time difference between consecutive levels.
inline std::vector<ResidualLevel> residual_refinement(const TorusDomain& dom, const FourierFunction& f, double alpha,
                                                      double t, double dt0 = 1e-3, std::size_t levels = 3) {
  if (!(dt0 > 0.0) || dt0 >= t) throw std::invalid_argument("residual_refinement: need 0 < dt0 < t");
  std::vector<ResidualLevel> out;
  double dt = dt0;
  for (std::size_t l = 0; l < levels; ++l, dt *= 0.5) {
    const std::vector<VhjField> family{cole_hopf(dom, f, alpha, t - dt), cole_hopf(dom, f, alpha, t),
                                       cole_hopf(dom, f, alpha, t + dt)};
    ResidualLevel level{dt, vhj_residual(family), std::nullopt};
    if (!out.empty() && level.residual > 0.0 && out.back().residual > 0.0) {
      level.observed_order = std::log2(out.back().residual / level.residual);
    }
    out.push_back(level);
  }
  return out;
}

}  // namespace dklab
