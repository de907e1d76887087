#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "sievelab/exact_engine.hpp"
#include "sievelab/sieve_sim.hpp"

namespace sievelab {

// Discrete distribution over integer-vector keys; masses may sum to less
// than 1 when the source was truncated (the residual is treated as
// excluded mass by the comparisons below).
using DiscretePmf = std::map<std::vector<int>, double>;

DiscretePmf to_pmf(const EmpiricalPmf& empirical);
DiscretePmf to_pmf(const PatternPmf& pmf);
DiscretePmf to_pmf(const MarginalTable& table);

struct TvResult {
  double distance = 0.0;      // core sum plus half the excluded-mass gap
  double excluded_left = 0.0;
  double excluded_right = 0.0;
};

// (1/2) sum |p - q| over keys passing the restriction, plus half the
// absolute difference of the masses excluded on each side. Throws Error
// when the restriction leaves no keys at all.
TvResult tv_distance(const DiscretePmf& p, const DiscretePmf& q,
                     const std::function<bool(const std::vector<int>&)>& keep = {});

struct ComparisonReport {
  double tv_distance = 0.0;
  double observed_excluded = 0.0;
  double expected_excluded = 0.0;
  double chi_square = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::uint64_t replicates = 0;
  double min_expected = 5.0;
  double expected_tail_bound = 0.0;  // truncation carried by the exact side

  struct Cell {
    std::vector<int> key;
    double expected_count;
    double observed_count;
    bool pooled;
  };
  std::vector<Cell> cells;
};

// Pearson goodness of fit of observed counts against an expected pmf.
// Cells with expected count below min_expected pool into one tail cell,
// together with all observed keys outside the expected support and the
// expected mass the pmf does not enumerate. Throws Error with fewer than
// two cells after pooling. The p-value uses the upper regularized gamma
// function and is floored at 1e-300.
ComparisonReport chi_square_gof(const EmpiricalPmf& observed,
                                const DiscretePmf& expected,
                                double min_expected = 5.0,
                                double expected_tail_bound = 0.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov against a cdf (samples may arrive unsorted).
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

struct ConvergencePoint {
  double n;
  double estimate;
  double se;
};

struct ConvergenceTable {
  struct Row {
    double n;
    double estimate;
    double se;
    double gap;  // |estimate - target|, or the raw estimate in divergence mode
  };
  std::vector<Row> rows;
  bool monotone = false;
  bool divergence_mode = false;  // target was the infinity marker
};

// Gap-to-target table across n. With a finite target the flag reports
// nonincreasing gaps; with an infinite target the gaps column holds the raw
// estimates and the flag reports strict increase.
ConvergenceTable convergence_table(std::span<const ConvergencePoint> points,
                                   double target);

}  // namespace sievelab
