#pragma once

#include <cstdint>
#include <random>

namespace pinnfp {

/// Deterministic random source. std::mt19937_64 has a standard-mandated sequence, and the
/// mapping to doubles below is done by hand so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t next() { return engine_(); }

  /// Independent stream derived from a base seed and a purpose tag.
  static Rng stream(std::uint64_t seed, std::uint64_t tag) { return Rng(mix(seed ^ mix(tag + 0x9e3779b97f4a7c15ULL))); }

  /// splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pinnfp
