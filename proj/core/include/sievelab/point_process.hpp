#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "sievelab/rng.hpp"
#include "sievelab/stick_law.hpp"

namespace sievelab {

// Unit Poisson process on (0, infinity), extendable rightward.
class PoissonStream {
 public:
  // Ensures the rightmost realized point exceeds x.
  void extend_past(double x, RandomStream& rng) {
    while (points_.empty() || points_.back() <= x) {
      const double last = points_.empty() ? 0.0 : points_.back();
      points_.push_back(last + rng.next_exponential());
    }
  }

  std::span<const double> points() const { return points_; }
  double leftmost() const { return points_.front(); }

 private:
  std::vector<double> points_;
};

// One realization of the self-similar limit point process on a window
// [x_lo, x_hi]. On the log scale s = -log x the atoms form a stationary
// renewal process with spacing |log W|; the construction anchors at
// s0 = -log(x_hi) with the forward recurrence epoch s0 - log W0 and extends
// rightward (toward x_lo) by iid spacings. Extension past x_hi resolves the
// spacing that straddles the anchor: its total length is |log W|
// conditioned to exceed the realized forward part, then iid again.
class RenewalWindow {
 public:
  static RenewalWindow build(const StickLaw& law, RandomStream& rng, double x_lo,
                             double x_hi);

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }

  // Atoms inside [x_lo, x_hi], ascending.
  std::vector<double> points() const;

  void extend_below(const StickLaw& law, RandomStream& rng, double new_x_lo);
  void extend_above(const StickLaw& law, RandomStream& rng, double new_x_hi);

 private:
  RenewalWindow() = default;

  std::deque<double> epochs_;  // log scale, ascending
  double anchor_ = 0.0;        // s0
  double forward_part_ = 0.0;  // first epoch minus s0
  bool left_resolved_ = false;
  double x_lo_ = 0.0;
  double x_hi_ = 0.0;
};

// Counts of stream points inside consecutive gaps of the window.
struct GapOccupancy {
  struct Gap {
    double lo;
    double hi;
    std::int64_t count;
  };
  std::vector<Gap> gaps;
};

// Deterministic pairing of Poisson points into renewal gaps by merge-scan.
// A stream point coinciding with a window atom cannot happen almost surely
// and throws DataError. Points outside the atom range are ignored (they
// belong to gaps not yet closed).
GapOccupancy gap_counts(std::span<const double> atoms, std::span<const double> points);
GapOccupancy gap_counts(const RenewalWindow& window, const PoissonStream& stream);

// Joint occupancy counts (Z^(1),...,Z^(depth)) of the limit model: the gap
// containing the leftmost Poisson point Y and the next depth-1 gaps to its
// right. Gap counts are drawn as Poisson variables of the gap lengths,
// which is the same law as realizing the points one by one but stays O(1)
// per gap even where gaps are huge. Exact; no truncation.
std::vector<std::int64_t> sample_limit_Z(const StickLaw& law, RandomStream& rng,
                                         int depth);

struct StopParams {
  int consecutive = 12;          // gaps in a row that must look saturated
  int factor = 4;                // saturation threshold is factor * r_max
  long long gap_budget = 100'000;
};

struct StopDiagnostics {
  long long gaps_scanned = 0;
  double last_gap_hi = 0.0;
  int run_length = 0;
  bool triggered = false;
};

struct LimitKrSample {
  // counts[r] = number of gaps holding exactly r points, r = 0..r_max.
  // The gap containing Y counts with its full occupancy (so never toward
  // r = 0); empty gaps are counted strictly to the right of Y's gap.
  std::vector<std::int64_t> counts;
  bool k0_infinite = false;  // nu = infinity: coordinate 0 not simulated
  StopDiagnostics diagnostics;
};

// Scans gaps rightward from the gap containing Y, tallying occupancies up
// to r_max, and stops once `consecutive` gaps in a row each hold more than
// factor*r_max points. The rule is a heuristic with reported diagnostics;
// throws BudgetError if it never triggers within gap_budget gaps.
LimitKrSample sample_limit_Kr(const StickLaw& law, RandomStream& rng, int r_max,
                              const StopParams& stop = {});

namespace detail {
// Stop-rule scan over a fixed occupancy sequence; exposed for property
// tests of the rule itself. Returns the 1-based index of the gap at which
// the scan stops, or -1 if the rule never triggers.
long long stop_scan_index(std::span<const std::int64_t> counts, int r_max,
                          const StopParams& stop);
}  // namespace detail

}  // namespace sievelab
