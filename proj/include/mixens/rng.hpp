#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mixens {

// Seeded randomness for splits, synthetic fixtures and augmentation.
//
// The engine is std::mt19937_64 (MT19937-64, reference output: the 10000th
// draw from a default-seeded engine is 9981545732273789042). The standard
// library's distributions are implementation-defined, so every derived
// quantity below is computed by hand from raw 64-bit draws; results are
// identical on every conforming implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n) by rejection sampling; n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (0 - n) % n;  // 2^64 mod n
    while (true) {
      const std::uint64_t x = next_u64();
      if (x >= limit) return x % n;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller (one value per call).
  double normal();

  /// Fisher-Yates shuffle, last position first.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer applied to seed + (stream + 1) * golden-ratio constant.
/// Used to derive independent per-task / per-predictor / per-image seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mixens
