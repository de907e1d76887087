#pragma once

#include <array>
#include <cstdint>

namespace sievelab {

// Random stream with counter-based derivation: stream k under a master seed
// is a pure function of (seed, k), so a replicate draws the same values no
// matter which worker executes it or in what order. The generator state is
// xoshiro256++, expanded from the (seed, index) pair through SplitMix64.
//
// All samplers below are hand-rolled so that sequences are reproducible
// independent of the standard library implementation.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns an endpoint.
  double next_unit();

  // Exponential with rate 1.
  double next_exponential();

  // Standard normal (Box-Muller, no cached spare).
  double next_normal();

  // Gamma with the given shape and unit scale (Marsaglia-Tsang; boosted for
  // shape < 1).
  double next_gamma(double shape);

  double next_beta(double alpha, double beta);

  // Binomial(trials, p). Inversion for small mean, transformed rejection
  // with squeeze for large mean; both paths are exact.
  std::int64_t next_binomial(std::int64_t trials, double p);

  // Poisson(mean). Inversion below mean 10, transformed rejection above.
  // mean must be < 1e15 so counts stay exactly representable.
  std::int64_t next_poisson(double mean);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace sievelab
