#include "modkit/rng.hpp"

#include <cmath>

namespace modkit::rng {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed) noexcept {
  // splitmix64 sequence to fill the xoshiro state; all-zero state is
  // unreachable because splitmix64_mix is a bijection over a counter.
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    word = splitmix64_mix(x);
  }
}

std::uint64_t Stream::next_u64() noexcept {
  // xoshiro256** (Blackman & Vigna)
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Stream::uniform_below(std::uint64_t n) noexcept {
  // rejection below 2^64 mod n keeps the draw unbiased
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double Stream::uniform01() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::normal() noexcept {
  for (;;) {
    const double u = 2.0 * uniform01() - 1.0;
    const double v = 2.0 * uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double Stream::lognormal(double mu, double sd) noexcept {
  return std::exp(mu + sd * normal());
}

double Stream::truncated_normal(double lo, double hi) noexcept {
  for (;;) {
    const double z = normal();
    if (z >= lo && z <= hi) return z;
  }
}

}  // namespace modkit::rng
