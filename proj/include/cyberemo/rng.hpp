#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace cyberemo {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seeding and for
// deriving substream keys.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Which independent stream of an agent a draw belongs to.
enum class Channel : std::uint64_t { dynamics = 1, expression = 2, field = 3, posterior = 4, synthetic = 5 };

// xoshiro256** 1.0 (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
//
// Substreams are keyed by (seed, agent, run, channel): the four words are
// folded through SplitMix64 and the result seeds the 256-bit state, so a
// stream depends only on its key and never on scheduling or draw order in
// other streams. Normal and uniform variates are produced by the member
// functions below rather than <random> distributions, whose output is
// implementation-defined; traces are therefore identical across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  static Rng substream(std::uint64_t seed, std::uint64_t agent, std::uint64_t run, Channel channel) {
    std::uint64_t mix = seed;
    std::uint64_t key = splitmix64(mix);
    for (std::uint64_t word : {agent, run, static_cast<std::uint64_t>(channel)}) {
      mix = key ^ (word + 0x632BE59BD9B4E019ULL);
      key = splitmix64(mix);
    }
    return Rng(key);
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
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

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [-1, 1).
  double uniform_pm1() { return 2.0 * uniform() - 1.0; }

  // Standard normal via Box-Muller; one variate per call, no cached pair.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4]{};
};

}  // namespace cyberemo
