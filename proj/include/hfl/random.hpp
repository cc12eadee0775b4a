#pragma once

#include <cstdint>
#include <random>

namespace hfl {

/// 64-bit seeded random stream. Every stochastic operation takes one explicitly.
///
/// Substreams are derived by hashing (seed, a, b) so that a replicate's draws
/// depend only on its coordinates and never on scheduling.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(mix(seed)) {}

  static RandomStream derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return RandomStream(mix(mix(mix(seed) ^ a) + b));
  }

  RandomStream split(std::uint64_t tag) const { return derive(seed_of(), tag, 0x5157ULL); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

  engine_type& engine() { return engine_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_of() const {
    auto copy = engine_;
    return copy();
  }

  engine_type engine_;
};

}  // namespace hfl
