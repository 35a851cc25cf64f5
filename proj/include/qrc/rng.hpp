// rng.hpp -- portable seeded random streams
//
// Every random quantity comes from std::mt19937_64 (its output sequence is
// fixed by the standard) seeded through a SplitMix64 chain:
//
//   stream_seed(base, tag, index) = mix(mix(mix(base) ^ tag) ^ index)
//
// Tags name the purpose (coupling matrices, input-signal phases, ...) so
// streams for different purposes and indices never share a seed. Doubles are
// built from the top 53 bits, never via std::uniform_real_distribution, whose
// algorithm is implementation-defined.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qrc {

enum class StreamTag : std::uint64_t {
  coupling = 0x636f75706c696e67ULL,  // "coupling"
  signal = 0x7369676e616c0000ULL,    // "signal"
  test = 0x7465737400000000ULL,      // "test"
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t base, StreamTag tag, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(base) ^ static_cast<std::uint64_t>(tag)) ^ index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t base, StreamTag tag, std::uint64_t index) : engine_(stream_seed(base, tag, index)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; only used to build test fixtures.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qrc
