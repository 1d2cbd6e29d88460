#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hsd {

// Seeded random source. All sampling in the library routes through this so
// that runs are reproducible bit-for-bit for a fixed seed. Streams derived
// from (seed, stream_id) are independent; one stream per trial/session.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed) : engine_(mix(seed)) {}

  static RandomSource stream(uint64_t seed, uint64_t stream_id) {
    return RandomSource(mix(seed) ^ mix(stream_id * 0x9e3779b97f4a7c15ull + 1));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(engine_() % static_cast<uint64_t>(n));
  }

  // Index sampled from a probability vector by CDF inversion.
  // The vector must sum to ~1; the last positive entry absorbs rounding.
  int categorical(std::span<const double> probs) {
    double u = uniform01();
    double cum = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] <= 0.0) continue;
      last_positive = i;
      cum += probs[i];
      if (u < cum) return i;
    }
    return last_positive;
  }

  uint64_t raw() { return engine_(); }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace hsd
