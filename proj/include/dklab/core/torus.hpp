#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dklab {

/// Wraps a real coordinate into [0, 1).
inline double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // x slightly below an integer
  return r;
}

/// The unit circle [0, 1) sampled on a uniform grid of `grid_size` cells.
/// Flat, so the curvature constant in the gradient bound is zero.
class TorusDomain {
 public:
  explicit TorusDomain(std::size_t grid_size) : grid_size_(grid_size) {
    if (grid_size < 8 || !std::has_single_bit(grid_size)) {
      throw std::invalid_argument("TorusDomain: grid_size must be a power of two >= 8, got " +
                                  std::to_string(grid_size));
    }
  }

  [[nodiscard]] std::size_t grid_size() const noexcept { return grid_size_; }
  [[nodiscard]] static constexpr double length() noexcept { return 1.0; }
  [[nodiscard]] double spacing() const noexcept { return 1.0 / static_cast<double>(grid_size_); }
  [[nodiscard]] double point(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(grid_size_);
  }
  /// Highest Fourier mode representable without the Nyquist term.
  [[nodiscard]] std::size_t max_resolved_mode() const noexcept { return grid_size_ / 2 - 1; }

  [[nodiscard]] std::vector<double> points() const {
    std::vector<double> xs(grid_size_);
    for (std::size_t j = 0; j < grid_size_; ++j) xs[j] = point(j);
    return xs;
  }

  static double reduce(double x) noexcept { return wrap_unit(x); }

  friend bool operator==(const TorusDomain&, const TorusDomain&) = default;

 private:
  std::size_t grid_size_;
};

}  // namespace dklab
