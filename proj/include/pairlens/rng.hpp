#pragma once

#include <cstdint>
#include <string_view>

namespace pairlens {

// Deterministic PRNG used everywhere randomness is needed.
//
// std::uniform_*_distribution output is implementation-defined, which would
// break byte-identical artifacts across standard libraries. This engine
// (splitmix64-seeded xoshiro256++) plus the bounded/next_double samplers below
// produce the same stream on every platform. Streams are derived from one run
// seed via labels and counters, so parallel consumers cannot perturb each
// other's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = split_mix(s);
  }

  static std::uint64_t split_mix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : label) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Stream derivation: derive(seed, "bootstrap", i) is independent of every
  // other (label, counter) stream for the same run seed.
  static Rng derive(std::uint64_t seed, std::string_view label,
                    std::uint64_t counter = 0) {
    std::uint64_t x = seed ^ hash_label(label);
    std::uint64_t a = split_mix(x);
    x ^= counter * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = split_mix(x);
    return Rng(a ^ (b << 1 | b >> 63));
  }

  std::uint64_t next() {
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

  // Uniform in [0, n). Multiply-shift; bias is < n/2^64 and identical everywhere.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [lo, hi] inclusive.
  long long range_int(long long lo, long long hi) {
    return lo + static_cast<long long>(
                    bounded(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace pairlens
