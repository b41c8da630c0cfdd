#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace curriculum {

// Seeded random source. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the distributions are implemented here because
// the std:: ones differ between standard library vendors, and traces must be
// byte-stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller (no cached second variate).
  double normal();

  // Index drawn from a discrete distribution; zero-probability entries are
  // never returned. Probabilities need not sum exactly to one.
  std::size_t discrete(std::span<const double> probabilities);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent sub-seeds
// (per epoch, per stream) from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace curriculum
