#pragma once

// g(s) = E s^X for X = alpha mu_t(A), as determined by the Laplace duality:
//
//   g(s) = exp(alpha <mu_0, ln(1 + (s - 1) h)>),   h = P_t 1_A,
//
// well defined and smooth on (-delta, inf) when h <= 1 - delta.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/torus.hpp"
#include "dklab/particles/empirical_measure.hpp"
#include "dklab/pgf/occupation.hpp"

namespace dklab {

/// 113-bit binary float used where remainders are divided by s^n.
using Extended = boost::multiprecision::cpp_bin_float_quad;

/// Atomic probability measure sum_i w_i delta_{x_i}.
struct WeightedAtoms {
  std::vector<double> positions;
  std::vector<double> weights;
  /// Set when every weight is 1/n; exponents are then formed as alpha / n.
  std::optional<std::size_t> uniform_count;

  static WeightedAtoms from(const EmpiricalMeasure& mu) {
    WeightedAtoms a;
    a.positions.assign(mu.positions().begin(), mu.positions().end());
    a.weights.assign(mu.size(), mu.weight());
    a.uniform_count = mu.size();
    return a;
  }

  static WeightedAtoms weighted(std::vector<double> positions, std::vector<double> weights) {
    if (positions.size() != weights.size() || positions.empty()) {
      throw std::invalid_argument("WeightedAtoms: positions and weights must be nonempty and of equal length");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0)) throw std::invalid_argument("WeightedAtoms: weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("WeightedAtoms: weights must sum to 1");
    for (auto& x : positions) x = wrap_unit(x);
    return {std::move(positions), std::move(weights), std::nullopt};
  }

  /// Fixed midpoint rule for an absolutely continuous mu_0 with the given
  /// density (must be positive with mean 1).
  static WeightedAtoms from_density(const TorusDomain& dom, const FourierFunction& density) {
    const std::size_t n = dom.grid_size();
    std::vector<double> xs(n), ws(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      xs[j] = (static_cast<double>(j) + 0.5) * dom.spacing();
      ws[j] = density(xs[j]) * dom.spacing();
      if (!(ws[j] > 0.0)) throw std::invalid_argument("WeightedAtoms: density must be positive");
      total += ws[j];
    }
    for (auto& w : ws) w /= total;
    return {std::move(xs), std::move(ws), std::nullopt};
  }

  [[nodiscard]] std::size_t size() const noexcept { return positions.size(); }

  [[nodiscard]] double exponent(std::size_t i, double alpha) const {
    return uniform_count ? alpha / static_cast<double>(*uniform_count) : alpha * weights[i];
  }
};

class GeneratingFunction {
 public:
  GeneratingFunction(double alpha, std::vector<double> exponents, std::vector<double> h_at_atoms, double delta)
      : alpha_(alpha), exponents_(std::move(exponents)), h_(std::move(h_at_atoms)), delta_(delta) {}

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }
  /// alpha * w_i for each atom.
  [[nodiscard]] std::span<const double> exponents() const noexcept { return exponents_; }
  [[nodiscard]] std::span<const double> h_at_atoms() const noexcept { return h_; }

  [[nodiscard]] double operator()(double s) const {
    check_domain(s);
    double log_g = 0.0;
    for (std::size_t i = 0; i < h_.size(); ++i) log_g += exponents_[i] * std::log1p((s - 1.0) * h_[i]);
    return std::exp(log_g);
  }

  [[nodiscard]] Extended extended(const Extended& s) const {
    check_domain(static_cast<double>(s));
    Extended log_g = 0;
    for (std::size_t i = 0; i < h_.size(); ++i) {
      log_g += Extended(exponents_[i]) * boost::multiprecision::log1p((s - 1) * Extended(h_[i]));
    }
    return boost::multiprecision::exp(log_g);
  }

 private:
  void check_domain(double s) const {
    if (!(s > -delta_)) {
      throw std::domain_error("g(s) is defined only for s > -delta = " + std::to_string(-delta_) +
                              " (log of a nonpositive argument)");
    }
  }

  double alpha_;
  std::vector<double> exponents_;
  std::vector<double> h_;
  double delta_;
};

inline GeneratingFunction build_g(double alpha, const WeightedAtoms& mu0, const OccupationFunction& occ) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("build_g: alpha must be positive");
  std::vector<double> exps(mu0.size()), hs(mu0.size());
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    exps[i] = mu0.exponent(i, alpha);
    hs[i] = occ(mu0.positions[i]);
  }
  return {alpha, std::move(exps), std::move(hs), occ.delta()};
}

inline GeneratingFunction build_g(double alpha, const EmpiricalMeasure& mu0, const OccupationFunction& occ) {
  return build_g(alpha, WeightedAtoms::from(mu0), occ);
}

/// Evaluator interface for coefficient extraction.
using ExtendedEvaluator = std::function<Extended(const Extended&)>;

inline ExtendedEvaluator evaluator(const GeneratingFunction& g) {
  return [g](const Extended& s) { return g.extended(s); };
}

inline ExtendedEvaluator polynomial_evaluator(std::vector<double> coeffs) {
  return [c = std::move(coeffs)](const Extended& s) {
    Extended acc = 0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + Extended(c[k]);
    return acc;
  };
}

/// s^beta for s > 0.
inline ExtendedEvaluator power_evaluator(double beta) {
  return [beta](const Extended& s) { return boost::multiprecision::pow(s, Extended(beta)); };
}

/// Least-squares slope of ln g against ln s on `points` geometric nodes in
/// [s_lo, s_hi]; tends to alpha as h -> 1 (A growing to the whole torus).
inline double loglog_slope(const GeneratingFunction& g, double s_lo, double s_hi, std::size_t points = 16) {
  if (!(s_lo > 0.0 && s_hi > s_lo) || points < 2) throw std::invalid_argument("loglog_slope: bad range");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double step = std::log(s_hi / s_lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = std::log(s_lo) + step * static_cast<double>(i);
    const double y = std::log(g(std::exp(x)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(points);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace dklab
