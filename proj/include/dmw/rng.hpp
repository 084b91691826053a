#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dmw {

// 64-bit seed wrapper. Identical seed + identical parameters must reproduce
// every randomized statistic bit-for-bit, so all sampling in this library
// goes through the generator below rather than <random> distributions
// (whose output is implementation-defined).
struct RngSeed {
  std::uint64_t value = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ with splitmix64 seeding and explicit child-stream derivation.
class Rng {
 public:
  explicit Rng(RngSeed seed) {
    std::uint64_t s = seed.value;
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

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in {0, ..., bound-1} without modulo bias.
  std::size_t next_index(std::size_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::next_index: bound must be positive");
    const std::uint64_t b = bound;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % b);
  }

  // Standard normal via Box-Muller, caching the paired deviate.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[next_index(i)]);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives a child seed for an independent stream. Parallel schedules stay
// deterministic because every task indexes its own child.
inline RngSeed child_seed(RngSeed parent, std::uint64_t index) {
  std::uint64_t s = parent.value ^ 0xa0761d6478bd642fULL;
  detail::splitmix64(s);
  s ^= index * 0xe7037ed1a0b428dbULL;
  return RngSeed{detail::splitmix64(s)};
}

inline RngSeed child_seed(RngSeed parent, std::uint64_t a, std::uint64_t b) {
  return child_seed(child_seed(parent, a), b);
}

inline RngSeed child_seed(RngSeed parent, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return child_seed(child_seed(parent, a, b), c);
}

}  // namespace dmw
