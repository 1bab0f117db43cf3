#pragma once

// Replicate-parallel execution. Work is split into contiguous index blocks and
// every index writes only its own output slot, so results never depend on the
// number of threads. Reductions are done afterwards in index order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace dklab {

/// Thread cap from DKLAB_THREADS (unset, empty or invalid: hardware concurrency).
inline unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("DKLAB_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  const std::string value(env);
  if (value == "max") return hw;
  try {
    const long parsed = std::stol(value);
    if (parsed >= 1) return static_cast<unsigned>(parsed);
  } catch (const std::exception&) {
  }
  return hw;
}

/// Calls body(begin, end) over [0, count) split across at most `threads` workers.
/// threads == 0 means thread_budget().
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads == 0) threads = thread_budget();
  const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Pairwise summation in a fixed tree order.
inline double ordered_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return ordered_sum(values.first(half)) + ordered_sum(values.subspan(half));
}

/// Mean and standard error of the mean of i.i.d. samples.
struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_mean = 0.0;
};

inline SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (s.count == 0) return s;
  s.mean = ordered_sum(values) / static_cast<double>(s.count);
  if (s.count > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - s.mean;
      sq[i] = d * d;
    }
    s.variance = ordered_sum(sq) / static_cast<double>(s.count - 1);
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(s.count));
  }
  return s;
}

}  // namespace dklab
