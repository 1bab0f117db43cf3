#pragma once

// h = P_t 1_A for a finite union A of arcs, with P_t the heat semigroup of
// (diffusivity/2) d^2/dx^2. The indicator's Fourier coefficients are exact;
// it is smoothed by a one-cell box filter (mass preserving, shifts the set
// boundary by at most half a cell) before propagation and truncation to the
// grid's resolved modes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/torus.hpp"

namespace dklab {

/// Arc [lo, hi) of the torus; lo > hi wraps through 0.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double length() const noexcept { return lo <= hi ? hi - lo : 1.0 - lo + hi; }
  [[nodiscard]] bool contains(double x) const noexcept {
    x = wrap_unit(x);
    return lo <= hi ? (x >= lo && x < hi) : (x >= lo || x < hi);
  }
};

/// Arc of the given length centred at `center`.
inline Interval centered_arc(double center, double length) {
  if (!(length > 0.0 && length < 1.0)) throw std::invalid_argument("centered_arc: length must be in (0, 1)");
  return {wrap_unit(center - 0.5 * length), wrap_unit(center + 0.5 * length)};
}

class OccupationFunction {
 public:
  static OccupationFunction build(const TorusDomain& dom, std::vector<Interval> set, double t, double diffusivity) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("OccupationFunction: t must be positive");
    if (!(diffusivity > 0.0)) throw std::domain_error("OccupationFunction: diffusivity must be positive");
    if (set.empty()) throw std::invalid_argument("OccupationFunction: A must be nonempty");
    double measure = 0.0;
    for (const auto& iv : set) {
      if (!(iv.lo >= 0.0 && iv.lo < 1.0 && iv.hi >= 0.0 && iv.hi <= 1.0) || iv.lo == iv.hi) {
        throw std::invalid_argument("OccupationFunction: interval endpoints must lie in [0, 1) and differ");
      }
      measure += iv.length();
    }
    check_disjoint(set);
    if (!(measure < 1.0)) throw std::invalid_argument("OccupationFunction: A must be a proper subset of the torus");

    const std::size_t modes = dom.max_resolved_mode();
    const double dx = dom.spacing();
    std::vector<double> a(modes, 0.0), b(modes, 0.0);
    for (std::size_t k = 1; k <= modes; ++k) {
      const double w = kTwoPi * static_cast<double>(k);
      const double pk = std::numbers::pi * static_cast<double>(k);
      const double box = std::sin(pk * dx) / (pk * dx);
      const double heat = std::exp(-0.5 * diffusivity * w * w * t);
      double ak = 0.0, bk = 0.0;
      for (const auto& iv : set) {
        // 2 int_lo^hi cos(w x) dx and 2 int_lo^hi sin(w x) dx; wrapped arcs split at 0
        const auto add = [&](double lo, double hi) {
          ak += (std::sin(w * hi) - std::sin(w * lo)) / pk;
          bk -= (std::cos(w * hi) - std::cos(w * lo)) / pk;
        };
        if (iv.lo <= iv.hi) {
          add(iv.lo, iv.hi);
        } else {
          add(iv.lo, 1.0);
          add(0.0, iv.hi);
        }
      }
      a[k - 1] = ak * box * heat;
      b[k - 1] = bk * box * heat;
    }
    OccupationFunction occ(dom, std::move(set), t, diffusivity, FourierFunction(measure, std::move(a), std::move(b)),
                           measure);
    return occ;
  }

  [[nodiscard]] double operator()(double x) const noexcept { return h_(x); }
  [[nodiscard]] const FourierFunction& fourier() const noexcept { return h_; }
  [[nodiscard]] const TorusDomain& domain() const noexcept { return dom_; }
  [[nodiscard]] std::span<const Interval> set() const noexcept { return set_; }
  [[nodiscard]] double t() const noexcept { return t_; }
  [[nodiscard]] double diffusivity() const noexcept { return diffusivity_; }
  [[nodiscard]] std::span<const double> h_values() const noexcept { return h_values_; }
  /// 1 - sup h; positive by construction.
  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] double inf_h() const noexcept { return inf_h_; }
  [[nodiscard]] double set_measure() const noexcept { return measure_; }
  /// Boundary displacement bound from the one-cell smoothing.
  [[nodiscard]] double set_measure_bias_bound() const noexcept { return 0.5 * dom_.spacing(); }

  [[nodiscard]] bool contains(double x) const noexcept {
    return std::any_of(set_.begin(), set_.end(), [x](const Interval& iv) { return iv.contains(x); });
  }

 private:
  OccupationFunction(TorusDomain dom, std::vector<Interval> set, double t, double diffusivity, FourierFunction h,
                     double measure)
      : dom_(dom), set_(std::move(set)), t_(t), diffusivity_(diffusivity), h_(std::move(h)), measure_(measure) {
    h_values_ = h_.sample(dom_);
    const auto e = extrema(h_, 4 * dom_.grid_size());
    delta_ = 1.0 - e.max;
    inf_h_ = e.min;
    if (!(delta_ > 0.0) || !(inf_h_ > 0.0)) {
      throw std::domain_error("OccupationFunction: h = P_t 1_A must satisfy 0 < h < 1 (sup h = " +
                              std::to_string(e.max) + ", inf h = " + std::to_string(e.min) + ")");
    }
  }

  static void check_disjoint(const std::vector<Interval>& set) {
    // split wrapped arcs and test pairwise overlap of the pieces
    std::vector<std::pair<double, double>> pieces;
    for (const auto& iv : set) {
      if (iv.lo <= iv.hi) {
        pieces.emplace_back(iv.lo, iv.hi);
      } else {
        pieces.emplace_back(iv.lo, 1.0);
        pieces.emplace_back(0.0, iv.hi);
      }
    }
    std::sort(pieces.begin(), pieces.end());
    for (std::size_t i = 1; i < pieces.size(); ++i) {
      if (pieces[i].first < pieces[i - 1].second) {
        throw std::invalid_argument("OccupationFunction: intervals of A must be disjoint");
      }
    }
  }

  TorusDomain dom_;
  std::vector<Interval> set_;
  double t_;
  double diffusivity_;
  FourierFunction h_;
  double measure_;
  std::vector<double> h_values_;
  double delta_ = 0.0;
  double inf_h_ = 0.0;
};

}  // namespace dklab
