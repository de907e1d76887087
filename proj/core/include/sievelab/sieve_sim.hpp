#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sievelab/pattern.hpp"
#include "sievelab/rng.hpp"
#include "sievelab/stick_law.hpp"

namespace sievelab {

// One finite-n realization. Box counts are stored right to left: counts[0]
// is the box adjacent to 1 and the last entry, always positive, is the
// leftmost occupied box.
struct SieveOutcome {
  std::vector<int> box_counts;
  int n = 0;

  int leftmost_index() const { return static_cast<int>(box_counts.size()); }

  // Occupancy of box i counted left to right from the leftmost occupied
  // box; 0 past the last box.
  int z(int i) const {
    const int k = leftmost_index();
    return (i >= 1 && i <= k) ? box_counts[static_cast<std::size_t>(k - i)] : 0;
  }

  std::vector<int> z_prefix(int length) const {
    std::vector<int> out(static_cast<std::size_t>(length), 0);
    for (int i = 1; i <= length; ++i) out[static_cast<std::size_t>(i - 1)] = z(i);
    return out;
  }

  Pattern pattern() const {
    return Pattern(std::vector<int>(box_counts.rbegin(), box_counts.rend()));
  }

  int occupied_count() const {
    int k = 0;
    for (const int c : box_counts) k += (c > 0);
    return k;
  }

  // K_{n,r}; for r = 0 only boxes right of the leftmost ball are counted
  // (the final box is positive by construction).
  int r_count(int r) const {
    int k = 0;
    for (const int c : box_counts) k += (c == r);
    return k;
  }
};

// Exact-in-distribution sampling of one outcome without materializing the
// uniforms: given P_{j-1}, the remaining balls are iid uniform on
// [0, P_{j-1}] and each lands in the next box independently with
// probability 1 - W_j, so the chain c_j ~ Binomial(m_{j-1}, 1 - W_j) with
// m_j = m_{j-1} - c_j reproduces the box counts in O(I_n) draws.
SieveOutcome simulate_outcome(const StickLaw& law, int n, RandomStream& rng);

// Empirical distribution over integer-vector keys (scalars use length-1
// keys). Counts are exact integers so merged aggregates are independent of
// worker count and merge order.
struct EmpiricalPmf {
  std::map<std::vector<int>, std::uint64_t> counts;
  std::uint64_t replicates = 0;

  double frequency(const std::vector<int>& key) const {
    const auto it = counts.find(key);
    return it == counts.end()
               ? 0.0
               : static_cast<double>(it->second) / static_cast<double>(replicates);
  }

  // Binomial standard error of the cell frequency.
  double standard_error(const std::vector<int>& key) const;

  void merge(const EmpiricalPmf& other);
};

enum class SieveStatistic { Pattern, ZPrefix, RCounts, LeftmostIndex, OccupiedCount };

struct ReplicateOptions {
  int workers = 0;             // 0: hardware concurrency
  int z_prefix_length = 8;
  int full_pattern_max_n = 12; // larger n falls back to the Z-prefix key
  int r_count_max = 8;
};

// Means and standard errors of K_{n,r}, r = 0..r_count_max, aggregated as
// exact integer sums.
struct KrSummary {
  std::vector<std::int64_t> sum;
  std::vector<std::int64_t> sum_sq;
  std::uint64_t replicates = 0;

  double mean(int r) const {
    return static_cast<double>(sum[static_cast<std::size_t>(r)]) /
           static_cast<double>(replicates);
  }
  double standard_error(int r) const;
};

struct ReplicateResult {
  EmpiricalPmf pmf;
  KrSummary r_counts;
  int n = 0;
  std::uint64_t seed = 0;
  SieveStatistic statistic = SieveStatistic::Pattern;
  bool pattern_key_truncated = false;  // Pattern statistic fell back to Z-prefix
};

// Runs simulate_outcome across independently derived streams, one per
// replicate index, and merges per-worker aggregates. Results depend only on
// (law, n, replicates, seed, statistic), never on the worker count.
ReplicateResult replicate(const StickLaw& law, int n, std::uint64_t replicates,
                          std::uint64_t seed, SieveStatistic statistic,
                          const ReplicateOptions& options = {});

}  // namespace sievelab
