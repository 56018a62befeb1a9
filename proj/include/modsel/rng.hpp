#pragma once

// Deterministic random number generation.
//
// Everything in the project draws from this one generator so that results are
// bit-identical across platforms and runs. The standard <random> engines are
// portable but the distributions are not, so the distribution transforms are
// spelled out here as well. Streams are stable within a given kRngVersion.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace modsel {

inline constexpr int kRngVersion = 1;

// SplitMix64 step; used for seed expansion and stream derivation.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent stream seed for (master, index). Trials seeded this way are
// order-independent: stream i never depends on whether stream j was drawn.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h + index;
  return splitmix64(s);
}

// xoshiro256++ with SplitMix64 seed expansion.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_{} {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  constexpr std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() noexcept { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe to pass to log().
  double next_open() noexcept {
    return ((next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Unbiased uniform integer in [0, bound); bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    std::uint64_t x = 0, r = 0;
    do {
      x = next_u64();
      r = x % bound;
    } while (x - r > std::numeric_limits<std::uint64_t>::max() - (bound - 1));
    return r;
  }

  // Integer in [lo, hi] inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Standard normal via Box-Muller. Always consumes exactly two words and
  // keeps no cached spare, so the stream position is easy to reason about.
  double next_normal() noexcept {
    const double u1 = next_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  bool next_bernoulli(double p) noexcept { return next_double() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace modsel
