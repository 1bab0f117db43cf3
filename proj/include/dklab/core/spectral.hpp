#pragma once

// Grid <-> Fourier-sum transforms backed by FFTW. Planning is serialised
// (FFTW planners are not re-entrant); execution on private buffers is not.

#include <fftw3.h>

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/torus.hpp"

namespace dklab {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class FftwPlan {
 public:
  explicit FftwPlan(fftw_plan plan) : plan_(plan) {
    if (plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace detail

/// Fourier sum with modes 1..dom.max_resolved_mode() interpolating `samples`
/// at the grid points (the Nyquist mode is dropped).
inline FourierFunction project(const TorusDomain& dom, std::span<const double> samples) {
  const std::size_t n = dom.grid_size();
  if (samples.size() != n) throw std::invalid_argument("project: sample count does not match grid");
  auto in = detail::fftw_buffer<double>(n);
  auto out = detail::fftw_buffer<fftw_complex>(n / 2 + 1);
  std::unique_ptr<detail::FftwPlan> plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = std::make_unique<detail::FftwPlan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t j = 0; j < n; ++j) in[j] = samples[j];
  plan->execute();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t modes = dom.max_resolved_mode();
  std::vector<double> a(modes), b(modes);
  for (std::size_t k = 1; k <= modes; ++k) {
    a[k - 1] = 2.0 * out[k][0] * inv_n;
    b[k - 1] = -2.0 * out[k][1] * inv_n;
  }
  return {out[0][0] * inv_n, std::move(a), std::move(b)};
}

/// Samples f at the grid points; uses an inverse FFT when the modes fit the grid.
inline std::vector<double> synthesize(const TorusDomain& dom, const FourierFunction& f) {
  const std::size_t n = dom.grid_size();
  if (f.max_mode() > dom.max_resolved_mode()) return f.sample(dom);
  auto in = detail::fftw_buffer<fftw_complex>(n / 2 + 1);
  auto out = detail::fftw_buffer<double>(n);
  std::unique_ptr<detail::FftwPlan> plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = std::make_unique<detail::FftwPlan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k <= n / 2; ++k) {
    in[k][0] = 0.0;
    in[k][1] = 0.0;
  }
  in[0][0] = f.mean();
  for (std::size_t k = 1; k <= f.max_mode(); ++k) {
    in[k][0] = 0.5 * f.cos_coeff(k);
    in[k][1] = -0.5 * f.sin_coeff(k);
  }
  plan->execute();
  return {out.get(), out.get() + n};
}

/// Projection of the pointwise map phi(f(x)) sampled on the grid.
template <class Map>
FourierFunction project_map(const TorusDomain& dom, const FourierFunction& f, Map&& phi) {
  auto values = synthesize(dom, f);
  for (auto& v : values) v = phi(v);
  return project(dom, values);
}

}  // namespace dklab
