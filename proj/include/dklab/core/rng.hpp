#pragma once

// Counter-based random streams (Philox4x32-10) keyed by (seed, stream_id).
//
// The output of a stream depends only on the seed, the stream id and how many
// values have been drawn from it, so replicate r / particle i can always be
// regenerated from stream_id = r * 2^32 + i regardless of which thread runs it.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dklab {

namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr Counter round(Counter ctr, Key key) noexcept {
  const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
  const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

/// Ten-round Philox4x32 block function.
constexpr Counter block(Counter ctr, Key key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

}  // namespace philox

/// splitmix64 finaliser; used to derive independent seeds for sweep cells.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ull));
}

/// Stream id convention for particle i of replicate r.
constexpr std::uint64_t replicate_stream_id(std::uint64_t replicate, std::uint64_t particle = 0) noexcept {
  return (replicate << 32) + particle;
}

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : seed_(seed), stream_id_(stream_id) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words drawn so far.
  [[nodiscard]] std::uint64_t position() const noexcept { return 2 * block_index_ - (have_second_word_ ? 1 : 0); }

  /// Fresh stream at stream_id() + offset with the same seed.
  [[nodiscard]] RngStream substream(std::uint64_t offset) const noexcept { return {seed_, stream_id_ + offset}; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    if (have_second_word_) {
      have_second_word_ = false;
      return second_word_;
    }
    const philox::Counter ctr{static_cast<std::uint32_t>(block_index_), static_cast<std::uint32_t>(block_index_ >> 32),
                              static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const philox::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox::block(ctr, key);
    ++block_index_;
    second_word_ = (std::uint64_t{out[3]} << 32) | out[2];
    have_second_word_ = true;
    return (std::uint64_t{out[1]} << 32) | out[0];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; values come in pairs.
  double normal() noexcept {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    have_cached_normal_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  std::uint64_t second_word_ = 0;
  double cached_normal_ = 0.0;
  bool have_second_word_ = false;
  bool have_cached_normal_ = false;
};

/// `count` independent N(0, variance) samples drawn from `stream`.
inline std::vector<double> gaussian_increment(RngStream& stream, std::size_t count, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::domain_error("gaussian_increment: variance must be positive and finite");
  }
  const double scale = std::sqrt(variance);
  std::vector<double> out(count);
  for (auto& v : out) v = scale * stream.normal();
  return out;
}

}  // namespace dklab
