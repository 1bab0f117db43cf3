#pragma once

// Truncated formal power series sum_{k=0}^{K} c_k s^k over any field-like
// scalar type (double, boost quad, ...).

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dklab {

template <class T>
class FormalSeries {
 public:
  explicit FormalSeries(std::size_t order) : c_(order + 1, T(0)) {}
  explicit FormalSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("FormalSeries: empty coefficient list");
  }

  /// ln(1 + q s) = sum_{k>=1} (-1)^{k+1} q^k s^k / k
  static FormalSeries log1p_linear(const T& q, std::size_t order) {
    FormalSeries out(order);
    T power = q;
    for (std::size_t k = 1; k <= order; ++k) {
      const T term = power / T(static_cast<double>(k));
      out.c_[k] = (k % 2 == 1) ? term : T(-term);
      power *= q;
    }
    return out;
  }

  [[nodiscard]] std::size_t order() const noexcept { return c_.size() - 1; }
  [[nodiscard]] const T& operator[](std::size_t k) const { return c_.at(k); }
  T& operator[](std::size_t k) { return c_.at(k); }
  [[nodiscard]] const std::vector<T>& coefficients() const noexcept { return c_; }

  FormalSeries& operator+=(const FormalSeries& other) {
    if (other.order() != order()) throw std::invalid_argument("FormalSeries: order mismatch");
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += other.c_[k];
    return *this;
  }

  FormalSeries& operator*=(const T& scale) {
    for (auto& c : c_) c *= scale;
    return *this;
  }

  friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) {
    if (a.order() != b.order()) throw std::invalid_argument("FormalSeries: order mismatch");
    FormalSeries out(a.order());
    for (std::size_t i = 0; i <= a.order(); ++i) {
      for (std::size_t j = 0; i + j <= a.order(); ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return out;
  }

  /// exp of the series; E' = L' E gives e_k = (1/k) sum_{j=1}^{k} j l_j e_{k-j}.
  [[nodiscard]] FormalSeries exp() const {
    using std::exp;
    FormalSeries out(order());
    out.c_[0] = exp(c_[0]);
    for (std::size_t k = 1; k <= order(); ++k) {
      T sum(0);
      for (std::size_t j = 1; j <= k; ++j) sum += T(static_cast<double>(j)) * c_[j] * out.c_[k - j];
      out.c_[k] = sum / T(static_cast<double>(k));
    }
    return out;
  }

  template <class S>
  [[nodiscard]] T evaluate(const S& s) const {
    T acc(0);
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * T(s) + c_[k];
    return acc;
  }

 private:
  std::vector<T> c_;
};

}  // namespace dklab
