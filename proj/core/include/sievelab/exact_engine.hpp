#pragma once

#include <map>
#include <span>
#include <vector>

#include "sievelab/pattern.hpp"
#include "sievelab/stick_law.hpp"

namespace sievelab {

// Probability that the box adjacent to 1 takes m of n balls:
// p(n:m) = C(n,m) E[W^{n-m} (1-W)^m], with p(0:0) = 1 so pattern products
// stay well formed.
double p_nm(const StickLaw& law, int n, int m);

// Exact probability that the sieve outcome equals the given pattern:
// the product of p(S_j : n_j) over left-to-right cumulative sums S_j. The
// multinomial weight of the classical display is already absorbed in the
// binomial factors of p, so it is not applied again.
double pattern_prob(const StickLaw& law, const Pattern& pattern);

// Limit law of the occupancy sequence: P{Z^(1)=n_1,...,Z^(l)=n_l} =
// (mu S_l)^-1 prod_j p(S_j : n_j) for n_1 > 0, n_j >= 0.
double limit_pmf(const StickLaw& law, std::span<const int> parts);
double limit_pmf(const StickLaw& law, std::initializer_list<int> parts);

struct EnumerationOptions {
  // Hard guard on the weak-composition count before enumeration starts.
  double composition_budget = 2e7;
  // Subtrees whose partial product falls below this are dropped and their
  // bound added to tail_bound.
  double prune_floor = 1e-16;
};

struct PatternPmf {
  std::map<Pattern, double> entries;
  double covered_mass = 0.0;
  double tail_bound = 0.0;  // guaranteed upper bound on omitted mass
  int n = 0;
  int k_max = 0;
};

// Every pattern of at most k_max boxes with its exact probability.
// tail_bound = n E[W]^k_max (mass of deeper patterns) plus pruned mass.
PatternPmf enumerate_finite(const StickLaw& law, int n, int k_max,
                            const EnumerationOptions& options = {});

struct MarginalTable {
  std::map<int, double> pmf;
  double tail_bound = 0.0;
};

struct FiniteMarginals {
  std::vector<MarginalTable> z;         // z[i]: occupancy of box i+1
  MarginalTable leftmost_index;
  MarginalTable occupied;
  std::vector<MarginalTable> r_counts;  // r_counts[r]: #boxes with r balls
  std::vector<double> expected_r_count; // E over covered mass
  double tail_bound = 0.0;
  int n = 0;
  int k_max = 0;
};

FiniteMarginals finite_marginals(const StickLaw& law, int n, int k_max,
                                 int z_depth = 8,
                                 const EnumerationOptions& options = {});

struct LimitMarginal {
  int coordinate = 1;
  std::map<int, double> pmf;
  // Upper bound on all mass missing from pmf (beyond the support cap plus
  // mass unattributed because of prefix truncation).
  double tail_bound = 0.0;
  // The prefix truncation residual alone; also bounds the error of each
  // individual pmf entry.
  double prefix_residual = 0.0;
};

// Marginal law of Z^(coordinate) under the limit model, by summing the
// joint pmf over the lower coordinates. Lower-coordinate caps grow until
// the unattributed mass drops below prefix_tol; throws NumericalError with
// the achieved residual when the evaluation budget runs out first.
LimitMarginal limit_marginal(const StickLaw& law, int coordinate,
                             int support_cap, double prefix_tol = 1e-4,
                             long long eval_budget = 20'000'000);

// E[K_r^*]: 1/(mu r) for r >= 1; nu/mu for r = 0, +infinity when nu is.
double expected_kr(const StickLaw& law, int r);

}  // namespace sievelab
