#include "sievelab/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/special_functions.hpp"

namespace sievelab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// Correction terms of Stirling's approximation, log(k!) - [k log k - k +
// 0.5 log(2 pi k)], tabulated for small k.
double stirling_tail(double k) {
  static const double table[] = {
      0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
      0.02079067210376509, 0.0166446911898211,  0.0138761288230707,
      0.0118967099458917,  0.0104112652619720,  0.00925546218271273,
      0.00833056343336287};
  if (k < 10.0) return table[static_cast<int>(k)];
  const double kp1sq = (k + 1.0) * (k + 1.0);
  return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1.0);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& word : state_) word = splitmix64(x);
  // All-zero state would make xoshiro degenerate; unreachable in practice.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t stream_index) {
  return RandomStream(master_seed ^ (0xD1B54A32D192ED03ull * (stream_index + 1)));
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::next_unit() {
  // 53-bit mantissa shifted by half an ulp keeps both endpoints excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_exponential() { return -std::log(next_unit()); }

double RandomStream::next_normal() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RandomStream::next_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0) {
    const double g = next_gamma(shape + 1.0);
    return g * std::pow(next_unit(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_unit();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::next_beta(double alpha, double beta) {
  if (alpha == 1.0 && beta == 1.0) return next_unit();
  for (;;) {
    const double ga = next_gamma(alpha);
    const double gb = next_gamma(beta);
    const double s = ga + gb;
    if (s > 0.0) return ga / s;
  }
}

std::int64_t RandomStream::next_binomial(std::int64_t trials, double p) {
  if (trials < 0 || !(p >= 0.0) || !(p <= 1.0))
    throw std::invalid_argument("binomial parameters out of range");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  if (p > 0.5) return trials - next_binomial(trials, 1.0 - p);

  const double n = static_cast<double>(trials);
  if (n * p < 10.0) {
    // Inversion (BINV): walk the cdf with the multiplicative recurrence.
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = (n + 1.0) * s;
    double r = std::exp(n * std::log1p(-p));
    double u = next_unit();
    std::int64_t k = 0;
    while (u > r) {
      u -= r;
      ++k;
      if (k > trials) return trials;
      r *= a / static_cast<double>(k) - s;
      if (!(r > 0.0)) return k;  // cdf exhausted within rounding
    }
    return k;
  }

  // Transformed rejection with squeeze (BTRS); exact for n*p >= 10, p <= 1/2.
  const double spq = std::sqrt(n * p * (1.0 - p));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double r = p / (1.0 - p);
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double m = std::floor((n + 1.0) * p);
  for (;;) {
    const double u = next_unit() - 0.5;
    double v = next_unit();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || kf > n) continue;
    v = std::log(v * alpha / (a / (us * us) + b));
    const double bound =
        (m + 0.5) * std::log((m + 1.0) / (r * (n - m + 1.0))) +
        (n + 1.0) * std::log((n - m + 1.0) / (n - kf + 1.0)) +
        (kf + 0.5) * std::log(r * (n - kf + 1.0) / (kf + 1.0)) +
        stirling_tail(m) + stirling_tail(n - m) - stirling_tail(kf) -
        stirling_tail(n - kf);
    if (v <= bound) return static_cast<std::int64_t>(kf);
  }
}

std::int64_t RandomStream::next_poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean >= 1e15)
    throw NumericalError("poisson mean too large for exact integer sampling", mean);

  if (mean < 10.0) {
    // Product-of-uniforms inversion.
    const double limit = std::exp(-mean);
    double prod = next_unit();
    std::int64_t k = 0;
    while (prod > limit) {
      prod *= next_unit();
      ++k;
    }
    return k;
  }

  // Transformed rejection (PTRS); exact for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = next_unit() - 0.5;
    const double v = next_unit();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - sf::log_gamma(kf + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace sievelab
