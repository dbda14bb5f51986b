#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace osag {

// Deterministic, portable random stream: xoshiro256** seeded through
// splitmix64. Every draw primitive is hand-rolled (std::*_distribution output
// is implementation-defined), so a given seed produces the same sequence on
// every platform and toolchain.
//
// Streams split: child(k) derives an independent stream from (seed, k), which
// is how parallel trials and per-seed runs get their own randomness.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = split_mix(x);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  // Number of raw 64-bit draws consumed so far.
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() noexcept {
    ++draws_;
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0,1) built from the top 53 bits. One draw.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0,n). Exactly one draw; the floor construction keeps
  // the draw count fixed (per-bucket bias is below 2^-53).
  std::uint64_t uniform_below(std::uint64_t n) noexcept {
    const auto idx = static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
    return idx < n ? idx : n - 1;
  }

  bool bernoulli(double p) noexcept { return next_unit() < p; }

  // Standard normal via Box-Muller. Exactly two draws, no cached spare.
  double next_gaussian() noexcept {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Independent stream derived from this stream's seed and a child index.
  SeededStream child(std::uint64_t index) const noexcept {
    std::uint64_t x = seed_ + 0x9E3779B97F4A7C15ULL * (index + 1);
    return SeededStream(split_mix(x));
  }

 private:
  static std::uint64_t split_mix(std::uint64_t& x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t v, int k) noexcept {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t state_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t draws_ = 0;
};

}  // namespace osag
