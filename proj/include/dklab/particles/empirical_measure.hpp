#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/torus.hpp"

namespace dklab {

/// (1/n) sum_i delta_{x_i} on the torus. Atoms may coincide.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> positions) : positions_(std::move(positions)) {
    if (positions_.empty()) throw std::invalid_argument("EmpiricalMeasure: needs at least one atom");
    for (auto& x : positions_) {
      if (!std::isfinite(x)) throw std::invalid_argument("EmpiricalMeasure: non-finite atom position");
      x = wrap_unit(x);
    }
  }

  /// n atoms placed at (2i + 1) / (2n).
  static EmpiricalMeasure evenly_spaced(std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n));
    return EmpiricalMeasure(std::move(xs));
  }

  [[nodiscard]] std::size_t size() const noexcept { return positions_.size(); }
  [[nodiscard]] std::span<const double> positions() const noexcept { return positions_; }
  [[nodiscard]] double weight() const noexcept { return 1.0 / static_cast<double>(positions_.size()); }

  /// <mu, fn> for any callable on [0, 1).
  template <class Fn>
  [[nodiscard]] double integrate(Fn&& fn) const {
    double sum = 0.0;
    for (double x : positions_) sum += fn(x);
    return sum / static_cast<double>(positions_.size());
  }

  [[nodiscard]] double total_mass() const {
    return integrate([](double) { return 1.0; });
  }

  friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;

 private:
  std::vector<double> positions_;
};

/// <mu, phi> = (1/n) sum_i phi(x_i)
inline double pair_against(const FourierFunction& phi, const EmpiricalMeasure& mu) {
  return mu.integrate([&](double x) { return phi(x); });
}

}  // namespace dklab
