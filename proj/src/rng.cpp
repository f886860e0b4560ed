#include "precipuq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace precipuq {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Abramowitz & Stegun 26.2.23 rational approximation, |error| < 4.5e-4.
// Good enough as a Newton starting point for the tail quantile.
double normal_quantile_seed(double p_tail) {
  const double t = std::sqrt(-2.0 * std::log(p_tail));
  const double num = 2.515517 + t * (0.802853 + t * 0.010328);
  const double den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308));
  return -(t - num / den);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;

  // Work on the lower tail; reflect at the end.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;

  double x = normal_quantile_seed(q);
  const double inv_sqrt_2pi = 0.3989422804014327;
  // Newton on F(x) - q with F from erfc; quadratic convergence, and both
  // F(x) and q are tail probabilities so the division stays well scaled.
  for (int it = 0; it < 8; ++it) {
    const double f = normal_cdf(x) - q;
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    if (pdf <= 0.0) break;
    const double step = f / pdf;
    x -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
  }
  return upper ? -x : x;
}

double Rng::normal() { return normal_quantile(uniform_open()); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace precipuq
