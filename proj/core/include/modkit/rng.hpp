#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace modkit::rng {

// Deterministic, splittable random streams.
//
// Every randomized computation in the library draws from a Stream derived
// from a master seed and a salt path, e.g. derive(seed, {salt::kTree, i})
// for the i-th tree. A stream is a pure function of (seed, salts), so
// parallel jobs can pre-derive their streams and produce output that is
// independent of scheduling and thread count.
//
// Scheme (fixed; results must stay stable across releases):
//   - salt mixing: state' = splitmix64_mix(state ^ splitmix64_mix(salt + GOLDEN))
//   - generator:   xoshiro256** seeded with four splitmix64 outputs
//   - uniform_below: rejection sampling (unbiased)
//   - uniform01:   top 53 bits / 2^53
//   - normal:      Marsaglia polar method
// None of this relies on std::<random> distributions, whose output is
// implementation-defined.

namespace salt {
inline constexpr std::uint64_t kPartition = 1;
inline constexpr std::uint64_t kTree = 2;
inline constexpr std::uint64_t kPermutation = 3;
inline constexpr std::uint64_t kTrain = 4;
inline constexpr std::uint64_t kSelection = 5;
inline constexpr std::uint64_t kScenarioFactor = 6;
inline constexpr std::uint64_t kScenarioFeature = 7;
inline constexpr std::uint64_t kEvaluation = 8;
}  // namespace salt

constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Hashes a salt path into a single 64-bit seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> salts) noexcept {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state = seed;
  for (std::uint64_t s : salts) {
    state = splitmix64_mix(state ^ splitmix64_mix(s + kGolden));
  }
  return state;
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) noexcept;

  static Stream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> salts) noexcept {
    return Stream(derive_seed(seed, salts));
  }

  std::uint64_t next_u64() noexcept;

  /// Uniform integer in [0, n). n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n) noexcept;

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Standard normal deviate (Marsaglia polar method).
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  /// exp(N(mu, sd^2)); always > 0.
  double lognormal(double mu, double sd) noexcept;

  /// Standard normal conditioned on [lo, hi], by rejection.
  double truncated_normal(double lo, double hi) noexcept;

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

}  // namespace modkit::rng
