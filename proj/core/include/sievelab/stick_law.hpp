#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sievelab/rng.hpp"

namespace sievelab {

struct BetaParams {
  double alpha;
  double beta;
};

// Memoized table of joint moments m(a,b) = E[W^a (1-W)^b], guarded for
// concurrent read/insert. A capacity of 0 means unbounded; once a nonzero
// capacity is reached, further values are computed but not stored.
class MomentCache {
 public:
  explicit MomentCache(std::size_t capacity = 0) : capacity_(capacity) {}

  std::optional<double> find(int a, int b) const {
    std::shared_lock lock(mutex_);
    const auto it = table_.find(key(a, b));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  void insert(int a, int b, double value) {
    std::unique_lock lock(mutex_);
    if (capacity_ != 0 && table_.size() >= capacity_) return;
    table_.emplace(key(a, b), value);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, double> table_;
  std::size_t capacity_;
};

// Distribution of the stick-breaking factor W on (0,1).
//
// Families and their text forms (accepted by parse / emitted by to_string):
//   uniform                          Beta(1,1)
//   beta-theta:2.0                   density theta x^(theta-1)
//   beta:1.5,2.5                     Beta(alpha, beta)
//   mixture:0.3*beta:1,1+0.7*beta:2,1  finite Beta mixture
//   heavy:1.0                        W = 1 - exp(-Z), Z Pareto(a) on [1,inf)
//
// All families are absolutely continuous with support inside (0,1), so
// |log W| is non-lattice. The heavy family exists to witness nu = infinity
// with mu finite: W >= 1 - 1/e keeps E[-log W] trivially finite while
// E[-log(1-W)] = E[Z] diverges for tail index a <= 1.
//
// Descriptors are immutable values; copies share the moment caches and the
// lazily built sampling grid. Sampling draws only from the caller's stream,
// so one law may serve many workers concurrently.
class StickLaw {
 public:
  enum class Kind { Uniform, BetaThetaOne, Beta, BetaMixture, HeavyMeander };

  static StickLaw uniform(std::size_t cache_capacity = 0);
  static StickLaw beta_theta_one(double theta, std::size_t cache_capacity = 0);
  static StickLaw beta(double alpha, double beta, std::size_t cache_capacity = 0);
  static StickLaw beta_mixture(std::vector<double> weights,
                               std::vector<BetaParams> components,
                               std::size_t cache_capacity = 0);
  static StickLaw heavy_meander(double tail_index, std::size_t cache_capacity = 0);

  // Parses the text form shown above; throws std::invalid_argument on
  // malformed input.
  static StickLaw parse(std::string_view text, std::size_t cache_capacity = 0);
  std::string to_string() const;

  Kind kind() const;

  // One draw of W, strictly inside (0,1) at double precision.
  double sample_w(RandomStream& rng) const;

  // m(a,b) = E[W^a (1-W)^b]. Beta families use the closed Beta-ratio form;
  // the heavy family uses adaptive quadrature at absolute tolerance 1e-10
  // (NumericalError on non-convergence). Results are memoized.
  double joint_moment(int a, int b) const;

  // C(n,m) * m(n-m, m), the single-box occupancy probability. For
  // quadrature-backed families the binomial weight is folded into the
  // integrand so the absolute tolerance applies to the product, not to a
  // moment that the coefficient would then amplify.
  double binomial_moment(int n, int m) const;

  // mu = E[-log W], always finite for the supported families.
  double mu() const;

  // nu = E[-log(1-W)]; +infinity for the heavy family, decided
  // analytically, never inferred from quadrature.
  double nu() const;
  bool nu_is_finite() const;

  double mean_w() const { return joint_moment(1, 0); }

  // P{W < x}.
  double cdf_w(double x) const;

  // One draw of W0, density P{W < x} / (mu x) on (0,1]: the size-biased
  // stick factor, equivalently -log W0 is the stationary forward recurrence
  // time of the renewal walk with spacing |log W|. Inverse transform on a
  // lazily built monotone CDF grid (1e-8 interpolation tolerance; the grid
  // build validates that the density integrates to 1 and throws
  // NumericalError otherwise).
  double sample_w0(RandomStream& rng) const;

  // |log W| conditioned to exceed r: the spacing that straddles an already
  // realized renewal epoch with forward part r. Exponential-spacing
  // families use the memoryless shortcut; the rest try rejection up to
  // rejection_budget attempts and then invert the conditional cdf
  // numerically, which matches rejection in distribution.
  double sample_abs_log_w_above(RandomStream& rng, double r,
                                int rejection_budget = 256) const;

  struct Impl;

 private:
  explicit StickLaw(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace sievelab
