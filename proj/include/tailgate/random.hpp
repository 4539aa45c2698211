#pragma once

#include <cstdint>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace tailgate {

// SplitMix64 step: adds the golden-ratio increment, then finalizes.
// Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// xoshiro256++ (Blackman & Vigna). State is filled from the seed by
// successive SplitMix64 outputs. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept {
    for (auto& word : s_) {
      word = splitmix64(seed);
      seed += 0x9E3779B97F4A7C15ULL;
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Every stochastic routine takes one of these by reference. Runs that may
// execute concurrently each own their engine.
using Rng = Xoshiro256pp;

// Seed for stream `index` under `master`: splitmix64(splitmix64(master) ^
// splitmix64(index + 1)). Streams with distinct indices are decorrelated
// even for adjacent master seeds.
constexpr std::uint64_t mix_seed(std::uint64_t master,
                                 std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Standard normal draw (ziggurat).
inline double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist;
  return dist(rng);
}

inline double standard_exponential(Rng& rng) {
  boost::random::exponential_distribution<double> dist;
  return dist(rng);
}

// Uniform on the open interval (0, 1).
inline double open_uniform(Rng& rng) {
  // 53 random mantissa bits, shifted off zero by half an ulp.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace tailgate
