#pragma once

#include <cstdint>
#include <random>

namespace precipuq {

// SplitMix64 finalizer. Used to derive independent child seeds from a master
// seed plus a task tag, so parallel tasks draw from disjoint streams no matter
// how they are scheduled.
std::uint64_t mix64(std::uint64_t x);

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

// Seeded generator with explicit, platform-independent output transforms.
// mt19937_64 is fully specified by the standard; the uniform/normal mappings
// below are ours, so streams are reproducible byte-for-byte everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1): 53-bit mantissa offset by half an ulp.
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via inverse-CDF of a (0,1) uniform.
  double normal();

  // Integer in [0, n). Rejection-free modulo bias is irrelevant for our n
  // (n << 2^64), but use rejection anyway to keep draws exact.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Inverse standard normal CDF. Newton-refined against the erfc-based CDF to
// full double precision; domain (0, 1), throws std::invalid_argument outside.
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

}  // namespace precipuq
