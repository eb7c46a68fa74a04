#pragma once

#include <cstdint>

namespace driftlab {

/**
 * @brief Deterministic random generator used by the synthetic-log lab.
 *
 * splitmix64 core. Standard-library distributions are implementation
 * defined, so sampling helpers are provided here instead; identical seeds
 * give identical draws on every platform.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform_real() { return double(next() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n); n must be positive. Rejection sampled, unbiased.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return std::size_t(x % bound);
  }

  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::uint64_t state_;
};

/// Derive an independent sub-seed from a base seed and a salt.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (salt * 0xd1b54a32d192ed03ULL));
  return r.next();
}

}  // namespace driftlab
