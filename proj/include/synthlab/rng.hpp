#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace synthlab {

// SplitMix64. Counter-based and platform-portable: all derived streams are
// pure functions of (seed, counter), so sampling plans replay bit-exactly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) via rejection-free scaling (bound << 2^64).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stateless hash of (seed, index); used for per-voxel noise fields so that
// generation order is independent of thread scheduling.
inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double hash_uniform(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(hash_counter(seed, index) >> 11) * 0x1.0p-53;
}

// Deterministic per-index standard normal (two hashed uniforms, Box-Muller).
inline double hash_gaussian(std::uint64_t seed, std::uint64_t index) {
  double u1 = hash_uniform(seed, 2 * index);
  const double u2 = hash_uniform(seed, 2 * index + 1);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace synthlab
