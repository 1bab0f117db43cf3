#pragma once

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace dklab {

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;  // after merging
};

/// Pearson goodness of fit of `observed` counts against category probabilities.
/// Adjacent categories are merged left to right until each expected count
/// reaches `min_expected`.
inline ChiSquareResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> probs,
                                      double min_expected = 5.0) {
  if (observed.size() != probs.size() || observed.empty()) throw std::invalid_argument("chi_square_gof: size mismatch");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o_acc += static_cast<double>(observed[k]);
    e_acc += total * probs[k];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  ChiSquareResult r;
  r.bins = obs.size();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] > 0.0) {
      const double d = obs[i] - exp[i];
      r.statistic += d * d / exp[i];
    }
  }
  if (r.bins < 2) return r;
  r.dof = r.bins - 1;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic);
  return r;
}

/// Smallest m with P(Bin(trials, p) > m) <= level: the number of single-test
/// failures a batch may show before it counts as a statistical failure.
inline std::size_t false_alarm_budget(std::size_t trials, double p, double level = 0.01) {
  if (trials == 0) return 0;
  const boost::math::binomial_distribution<double> bin(static_cast<double>(trials), p);
  for (std::size_t m = 0; m < trials; ++m) {
    if (boost::math::cdf(boost::math::complement(bin, static_cast<double>(m))) <= level) return m;
  }
  return trials;
}

/// Two-sided tail probability of |Z| > 3.
inline constexpr double kThreeSigmaTail = 0.0026997960632601866;

}  // namespace dklab
