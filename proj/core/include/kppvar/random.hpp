// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace kppvar {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256++ generator with Box-Muller normal variates.
///
/// The generator is seeded through splitmix64, so any 64-bit seed yields a
/// well-mixed state.  Normal variates are produced in pairs (the spare is
/// cached), which keeps the consumption pattern of the underlying uniform
/// stream independent of the sampled values.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = detail::splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in (0, 1].
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal variate (Box-Muller).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independently seeded stream for one realization of an ensemble.
///
/// Splittable counter scheme: the master seed and the realization index are
/// mixed through splitmix64 with a Weyl increment, so streams for distinct
/// indices are decorrelated and any realization can be regenerated without
/// touching the others.
inline RandomStream realization_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (0xA0761D6478BD642FULL * (index + 1));
  const std::uint64_t mixed = detail::splitmix64(s);
  return RandomStream(mixed);
}

}  // namespace kppvar
