#pragma once

// Finite Fourier sums on the unit torus,
//
//   f(x) = mean + sum_{k=1}^{K} (a_k cos 2 pi k x + b_k sin 2 pi k x),
//
// with the operators that act exactly on them: the generator L = d^2/dx^2,
// the carre du champ Gamma(f, g) = f' g', the heat semigroup and products.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dklab/core/torus.hpp"

namespace dklab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Jet {
  double value = 0.0;
  double first = 0.0;   // f'
  double second = 0.0;  // f''
};

class FourierFunction {
 public:
  FourierFunction() = default;

  FourierFunction(double mean, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
      : mean_(mean), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    const std::size_t k = std::max(cos_.size(), sin_.size());
    cos_.resize(k, 0.0);
    sin_.resize(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (!std::isfinite(cos_[i]) || !std::isfinite(sin_[i])) {
        throw std::invalid_argument("FourierFunction: non-finite coefficient");
      }
    }
    if (!std::isfinite(mean_)) throw std::invalid_argument("FourierFunction: non-finite mean");
  }

  static FourierFunction constant(double c) { return {c, {}, {}}; }

  /// amplitude * cos(2 pi k x)
  static FourierFunction cosine(std::size_t k, double amplitude = 1.0) {
    if (k == 0) return constant(amplitude);
    std::vector<double> a(k, 0.0);
    a[k - 1] = amplitude;
    return {0.0, std::move(a), {}};
  }

  /// amplitude * sin(2 pi k x)
  static FourierFunction sine(std::size_t k, double amplitude = 1.0) {
    if (k == 0) return constant(0.0);
    std::vector<double> b(k, 0.0);
    b[k - 1] = amplitude;
    return {0.0, {}, std::move(b)};
  }

  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] std::size_t max_mode() const noexcept { return cos_.size(); }
  [[nodiscard]] std::span<const double> cos_coeffs() const noexcept { return cos_; }
  [[nodiscard]] std::span<const double> sin_coeffs() const noexcept { return sin_; }
  /// Coefficient of cos(2 pi k x), k >= 1; zero beyond max_mode().
  [[nodiscard]] double cos_coeff(std::size_t k) const noexcept { return (k >= 1 && k <= cos_.size()) ? cos_[k - 1] : 0.0; }
  [[nodiscard]] double sin_coeff(std::size_t k) const noexcept { return (k >= 1 && k <= sin_.size()) ? sin_[k - 1] : 0.0; }

  [[nodiscard]] bool is_constant() const noexcept {
    return std::all_of(cos_.begin(), cos_.end(), [](double c) { return c == 0.0; }) &&
           std::all_of(sin_.begin(), sin_.end(), [](double c) { return c == 0.0; });
  }

  [[nodiscard]] double operator()(double x) const noexcept { return jet(x).value; }

  /// Value and first two derivatives at x, evaluated exactly from the modes.
  [[nodiscard]] Jet jet(double x) const noexcept {
    Jet out{mean_, 0.0, 0.0};
    const std::size_t modes = cos_.size();
    if (modes == 0) return out;
    const double theta = kTwoPi * wrap_unit(x);
    const double c1 = std::cos(theta);
    const double s1 = std::sin(theta);
    double ck = c1;
    double sk = s1;
    for (std::size_t k = 1; k <= modes; ++k) {
      if (k > 1) {
        // angle-addition recurrence, re-anchored periodically to bound drift
        if ((k & 31u) == 0) {
          const double th = kTwoPi * wrap_unit(static_cast<double>(k) * wrap_unit(x));
          ck = std::cos(th);
          sk = std::sin(th);
        } else {
          const double cn = ck * c1 - sk * s1;
          sk = sk * c1 + ck * s1;
          ck = cn;
        }
      }
      const double a = cos_[k - 1];
      const double b = sin_[k - 1];
      const double w = kTwoPi * static_cast<double>(k);
      out.value += a * ck + b * sk;
      out.first += w * (b * ck - a * sk);
      out.second -= w * w * (a * ck + b * sk);
    }
    return out;
  }

  /// Direct evaluation at every grid point of `dom`.
  [[nodiscard]] std::vector<double> sample(const TorusDomain& dom) const {
    std::vector<double> out(dom.grid_size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (*this)(dom.point(j));
    return out;
  }

  /// Keeps modes 1..modes.
  [[nodiscard]] FourierFunction truncated(std::size_t modes) const {
    const std::size_t k = std::min(modes, cos_.size());
    return {mean_, {cos_.begin(), cos_.begin() + static_cast<std::ptrdiff_t>(k)},
            {sin_.begin(), sin_.begin() + static_cast<std::ptrdiff_t>(k)}};
  }

  friend FourierFunction operator+(const FourierFunction& f, const FourierFunction& g) {
    const std::size_t k = std::max(f.max_mode(), g.max_mode());
    std::vector<double> a(k), b(k);
    for (std::size_t i = 1; i <= k; ++i) {
      a[i - 1] = f.cos_coeff(i) + g.cos_coeff(i);
      b[i - 1] = f.sin_coeff(i) + g.sin_coeff(i);
    }
    return {f.mean_ + g.mean_, std::move(a), std::move(b)};
  }

  friend FourierFunction operator*(double s, const FourierFunction& f) {
    FourierFunction out = f;
    out.mean_ *= s;
    for (auto& c : out.cos_) c *= s;
    for (auto& c : out.sin_) c *= s;
    return out;
  }

  friend FourierFunction operator-(const FourierFunction& f, const FourierFunction& g) { return f + (-1.0) * g; }
  friend FourierFunction operator*(const FourierFunction& f, double s) { return s * f; }

 private:
  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

inline FourierFunction derivative(const FourierFunction& f) {
  const std::size_t k = f.max_mode();
  std::vector<double> a(k), b(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double w = kTwoPi * static_cast<double>(i);
    a[i - 1] = w * f.sin_coeff(i);
    b[i - 1] = -w * f.cos_coeff(i);
  }
  return {0.0, std::move(a), std::move(b)};
}

/// L f = f''; mode k is multiplied by -(2 pi k)^2.
inline FourierFunction generator_L(const FourierFunction& f) {
  const std::size_t k = f.max_mode();
  std::vector<double> a(k), b(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double w = kTwoPi * static_cast<double>(i);
    a[i - 1] = -w * w * f.cos_coeff(i);
    b[i - 1] = -w * w * f.sin_coeff(i);
  }
  return {0.0, std::move(a), std::move(b)};
}

/// Exact pointwise product; the result has max_mode = f.max_mode() + g.max_mode().
inline FourierFunction multiply(const FourierFunction& f, const FourierFunction& g) {
  using cplx = std::complex<double>;
  const auto to_complex = [](const FourierFunction& h) {
    // c_k for k = 0..K, c_{-k} = conj(c_k)
    std::vector<cplx> c(h.max_mode() + 1);
    c[0] = h.mean();
    for (std::size_t k = 1; k <= h.max_mode(); ++k) c[k] = cplx(h.cos_coeff(k), -h.sin_coeff(k)) * 0.5;
    return c;
  };
  const auto cf = to_complex(f);
  const auto cg = to_complex(g);
  const auto kf = static_cast<long>(f.max_mode());
  const auto kg = static_cast<long>(g.max_mode());
  const long kmax = kf + kg;
  const auto coef = [](const std::vector<cplx>& c, long k) -> cplx {
    return k >= 0 ? c[static_cast<std::size_t>(k)] : std::conj(c[static_cast<std::size_t>(-k)]);
  };
  std::vector<double> a(static_cast<std::size_t>(kmax)), b(static_cast<std::size_t>(kmax));
  double mean = 0.0;
  for (long k = 0; k <= kmax; ++k) {
    cplx sum = 0.0;
    for (long i = std::max(-kf, k - kg); i <= std::min(kf, k + kg); ++i) sum += coef(cf, i) * coef(cg, k - i);
    if (k == 0) {
      mean = sum.real();
    } else {
      a[static_cast<std::size_t>(k - 1)] = 2.0 * sum.real();
      b[static_cast<std::size_t>(k - 1)] = -2.0 * sum.imag();
    }
  }
  return {mean, std::move(a), std::move(b)};
}

/// Heat semigroup generated by (diffusivity / 2) * L, acting on modes.
inline FourierFunction heat_semigroup(const FourierFunction& f, double diffusivity, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("heat_semigroup: time must be nonnegative");
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) {
    throw std::domain_error("heat_semigroup: diffusivity must be positive");
  }
  const std::size_t k = f.max_mode();
  std::vector<double> a(k), b(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double w = kTwoPi * static_cast<double>(i);
    const double damp = std::exp(-0.5 * diffusivity * w * w * t);
    a[i - 1] = damp * f.cos_coeff(i);
    b[i - 1] = damp * f.sin_coeff(i);
  }
  return {f.mean(), std::move(a), std::move(b)};
}

inline FourierFunction heat_semigroup(const TorusDomain& /*dom*/, const FourierFunction& f, double diffusivity,
                                      double t) {
  return heat_semigroup(f, diffusivity, t);
}

/// Gamma(f, g) = f' g' as an exact pointwise evaluator.
class CarreDuChamp {
 public:
  CarreDuChamp(const FourierFunction& f, const FourierFunction& g) : df_(derivative(f)), dg_(derivative(g)) {}

  [[nodiscard]] double operator()(double x) const noexcept { return df_(x) * dg_(x); }

  [[nodiscard]] std::vector<double> sample(const TorusDomain& dom) const {
    std::vector<double> out(dom.grid_size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (*this)(dom.point(j));
    return out;
  }

  /// The same function as a Fourier sum (exact product of the derivatives).
  [[nodiscard]] FourierFunction as_fourier() const { return multiply(df_, dg_); }

 private:
  FourierFunction df_;
  FourierFunction dg_;
};

inline CarreDuChamp carre_du_champ(const FourierFunction& f, const FourierFunction& g) { return {f, g}; }
inline CarreDuChamp carre_du_champ(const FourierFunction& f) { return {f, f}; }

struct TrigExtrema {
  double min = 0.0;
  double argmin = 0.0;
  double max = 0.0;
  double argmax = 0.0;
};

namespace detail {

// Root of f' in [lo, hi] given a sign change, Newton with bisection safeguard.
inline double polish_critical_point(const FourierFunction& f, double lo, double hi) {
  double dlo = f.jet(lo).first;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const Jet j = f.jet(x);
    if (j.first == 0.0) return x;
    if ((j.first < 0.0) == (dlo < 0.0)) {
      lo = x;
      dlo = j.first;
    } else {
      hi = x;
    }
    double next = (j.second != 0.0) ? x - j.first / j.second : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-17) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

/// Global extrema of a trigonometric polynomial: dense sampling (at least
/// `samples` points), then every local extremum is polished on f'.
inline TrigExtrema extrema(const FourierFunction& f, std::size_t samples = 0) {
  const std::size_t m = std::max<std::size_t>({samples, 64, 16 * (f.max_mode() + 1)});
  TrigExtrema out{f.mean(), 0.0, f.mean(), 0.0};
  if (f.is_constant()) return out;
  const double h = 1.0 / static_cast<double>(m);
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = f(static_cast<double>(i) * h);
  out.min = std::numeric_limits<double>::infinity();
  out.max = -std::numeric_limits<double>::infinity();
  const auto consider = [&](double x) {
    const double val = f(x);
    if (val < out.min) {
      out.min = val;
      out.argmin = wrap_unit(x);
    }
    if (val > out.max) {
      out.max = val;
      out.argmax = wrap_unit(x);
    }
  };
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = v[(i + m - 1) % m];
    const double next = v[(i + 1) % m];
    const bool local_min = v[i] <= prev && v[i] <= next;
    const bool local_max = v[i] >= prev && v[i] >= next;
    if (!local_min && !local_max) continue;
    const double x = static_cast<double>(i) * h;
    const double lo = x - h;
    const double hi = x + h;
    const double dlo = f.jet(lo).first;
    const double dhi = f.jet(hi).first;
    if ((dlo < 0.0) != (dhi < 0.0)) {
      consider(detail::polish_critical_point(f, lo, hi));
    }
    consider(x);
  }
  return out;
}

/// sup_x |f(x)|
inline double sup_norm(const FourierFunction& f) {
  const auto e = extrema(f);
  return std::max(std::abs(e.min), std::abs(e.max));
}

}  // namespace dklab
