#include "sievelab/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/special_functions.hpp"

namespace sievelab {

double p_nm(const StickLaw& law, int n, int m) {
  if (n == 0 && m == 0) return 1.0;
  if (n < 1 || m < 0 || m > n)
    throw std::invalid_argument("p_nm: need 0 <= m <= n with n >= 1");
  return law.binomial_moment(n, m);
}

double pattern_prob(const StickLaw& law, const Pattern& pattern) {
  double product = 1.0;
  bool underflow = false;
  int cumulative = 0;
  for (const int part : pattern.parts()) {
    cumulative += part;
    const double factor = p_nm(law, cumulative, part);
    product *= factor;
    if (factor < 1e-300) underflow = true;
  }
  if (!underflow && product >= 1e-300) return product;

  // Log-space fallback for extreme patterns.
  double log_product = 0.0;
  cumulative = 0;
  for (const int part : pattern.parts()) {
    cumulative += part;
    log_product += std::log(p_nm(law, cumulative, part));
  }
  return std::exp(log_product);
}

double limit_pmf(const StickLaw& law, std::span<const int> parts) {
  if (parts.empty()) throw std::invalid_argument("limit_pmf: needs at least one part");
  if (parts[0] <= 0) throw std::invalid_argument("limit_pmf: first part must be positive");
  double product = 1.0;
  int cumulative = 0;
  for (const int part : parts) {
    if (part < 0) throw std::invalid_argument("limit_pmf: parts must be nonnegative");
    cumulative += part;
    product *= p_nm(law, cumulative, part);
  }
  return product / (law.mu() * cumulative);
}

double limit_pmf(const StickLaw& law, std::initializer_list<int> parts) {
  return limit_pmf(law, std::span<const int>(parts.begin(), parts.size()));
}

namespace {

// Number of weak compositions of n into at most k_max parts with a positive
// first part, saturating at `cap`.
double weak_composition_count(int n, int k_max, double cap) {
  NeumaierSum total;
  double binom = 1.0;  // C(n-1, 0), then C(n-1+j, j) via the ratio recurrence
  for (int k = 1; k <= k_max; ++k) {
    total.add(binom);
    if (total.value() > cap) return total.value();
    binom *= static_cast<double>(n - 1 + k) / static_cast<double>(k);
  }
  return total.value();
}

}  // namespace

PatternPmf enumerate_finite(const StickLaw& law, int n, int k_max,
                            const EnumerationOptions& options) {
  if (n < 1) throw std::invalid_argument("enumerate_finite: n must be >= 1");
  if (k_max < 1) throw std::invalid_argument("enumerate_finite: k_max must be >= 1");

  const double count = weak_composition_count(n, k_max, options.composition_budget);
  if (count > options.composition_budget) {
    throw BudgetError("enumerate_finite: weak-composition count exceeds budget",
                      count, options.composition_budget);
  }

  PatternPmf out;
  out.n = n;
  out.k_max = k_max;

  NeumaierSum covered;
  NeumaierSum pruned;

  // Depth-first over boxes counted from the one adjacent to 1; placing all
  // remaining balls closes a pattern (the left-to-right parts are the
  // reversed generation order).
  std::vector<int> generated;
  generated.reserve(static_cast<std::size_t>(k_max));
  std::function<void(int, int, double)> walk = [&](int remaining, int depth,
                                                   double product) {
    for (int c = remaining; c >= 0; --c) {
      const double factor = p_nm(law, remaining, c);
      const double next = product * factor;
      if (next < options.prune_floor) {
        // Mass under this node is at most its partial product.
        pruned.add(next);
        continue;
      }
      if (c == remaining) {
        generated.push_back(c);
        std::vector<int> parts(generated.rbegin(), generated.rend());
        covered.add(next);
        out.entries.emplace(Pattern(std::move(parts)), next);
        generated.pop_back();
      } else if (depth + 1 < k_max) {
        generated.push_back(c);
        walk(remaining - c, depth + 1, next);
        generated.pop_back();
      }
      // Subtrees that would exceed k_max boxes belong to the analytic
      // tail bound below; nothing extra to add here.
    }
  };
  walk(n, 0, 1.0);

  out.covered_mass = covered.value();
  out.tail_bound = n * std::pow(law.mean_w(), k_max) + pruned.value();
  return out;
}

FiniteMarginals finite_marginals(const StickLaw& law, int n, int k_max,
                                 int z_depth, const EnumerationOptions& options) {
  if (z_depth < 1) throw std::invalid_argument("finite_marginals: z_depth must be >= 1");
  const PatternPmf pmf = enumerate_finite(law, n, k_max, options);

  FiniteMarginals out;
  out.n = n;
  out.k_max = k_max;
  out.tail_bound = pmf.tail_bound;

  std::vector<std::map<int, NeumaierSum>> z_acc(static_cast<std::size_t>(z_depth));
  std::map<int, NeumaierSum> index_acc;
  std::map<int, NeumaierSum> occupied_acc;
  std::vector<std::map<int, NeumaierSum>> r_acc(static_cast<std::size_t>(n) + 1);
  std::vector<NeumaierSum> r_expect(static_cast<std::size_t>(n) + 1);

  for (const auto& [pattern, mass] : pmf.entries) {
    for (int i = 1; i <= z_depth; ++i)
      z_acc[static_cast<std::size_t>(i - 1)][pattern.z(i)].add(mass);
    index_acc[pattern.leftmost_index()].add(mass);
    occupied_acc[pattern.occupied_count()].add(mass);
    for (int r = 0; r <= n; ++r) {
      const int k = pattern.count_with(r);
      r_acc[static_cast<std::size_t>(r)][k].add(mass);
      r_expect[static_cast<std::size_t>(r)].add(mass * k);
    }
  }

  const auto freeze = [&](const std::map<int, NeumaierSum>& acc) {
    MarginalTable table;
    table.tail_bound = pmf.tail_bound;
    for (const auto& [key, sum] : acc) table.pmf.emplace(key, sum.value());
    return table;
  };

  for (const auto& acc : z_acc) out.z.push_back(freeze(acc));
  out.leftmost_index = freeze(index_acc);
  out.occupied = freeze(occupied_acc);
  for (const auto& acc : r_acc) out.r_counts.push_back(freeze(acc));
  for (const auto& sum : r_expect) out.expected_r_count.push_back(sum.value());
  return out;
}

LimitMarginal limit_marginal(const StickLaw& law, int coordinate, int support_cap,
                             double prefix_tol, long long eval_budget) {
  if (coordinate < 1)
    throw std::invalid_argument("limit_marginal: coordinate must be >= 1");
  if (support_cap < 1)
    throw std::invalid_argument("limit_marginal: support cap must be >= 1");

  LimitMarginal out;
  out.coordinate = coordinate;

  if (coordinate == 1) {
    NeumaierSum covered;
    for (int k = 1; k <= support_cap; ++k) {
      const double p = limit_pmf(law, {k});
      out.pmf.emplace(k, p);
      covered.add(p);
    }
    out.prefix_residual = 0.0;
    out.tail_bound = std::max(0.0, 1.0 - covered.value());
    return out;
  }

  // Sum the joint pmf over lower-coordinate prefixes, growing the
  // per-coordinate cap until the unattributed prefix mass is small. The
  // residual is exact because summing a coordinate out of the joint law
  // recovers the shorter law, whose total mass is 1.
  long long evals = 0;
  double residual = 1.0;
  for (int cap = 64;; cap *= 4) {
    std::vector<NeumaierSum> acc(static_cast<std::size_t>(support_cap) + 1);
    NeumaierSum prefix_mass;
    std::vector<int> prefix(static_cast<std::size_t>(coordinate), 0);
    bool out_of_budget = false;

    std::function<void(int)> walk = [&](int position) {
      if (out_of_budget) return;
      const int lo = position == 0 ? 1 : 0;
      for (int v = lo; v <= cap; ++v) {
        prefix[static_cast<std::size_t>(position)] = v;
        if (position + 1 < coordinate - 1) {
          walk(position + 1);
          continue;
        }
        evals += support_cap + 2;
        if (evals > eval_budget) {
          out_of_budget = true;
          return;
        }
        const std::span<const int> head(prefix.data(),
                                        static_cast<std::size_t>(coordinate - 1));
        prefix_mass.add(limit_pmf(law, head));
        for (int m = 0; m <= support_cap; ++m) {
          prefix[static_cast<std::size_t>(coordinate - 1)] = m;
          const std::span<const int> full(prefix.data(),
                                          static_cast<std::size_t>(coordinate));
          acc[static_cast<std::size_t>(m)].add(limit_pmf(law, full));
        }
      }
    };
    walk(0);

    if (!out_of_budget) {
      residual = std::max(0.0, 1.0 - prefix_mass.value());
      if (residual <= prefix_tol) {
        NeumaierSum covered;
        for (int m = 0; m <= support_cap; ++m) {
          const double p = acc[static_cast<std::size_t>(m)].value();
          out.pmf.emplace(m, p);
          covered.add(p);
        }
        out.prefix_residual = residual;
        out.tail_bound = std::max(0.0, 1.0 - covered.value());
        return out;
      }
    } else {
      throw NumericalError(
          "limit_marginal: prefix truncation residual above tolerance within budget",
          residual);
    }
  }
}

double expected_kr(const StickLaw& law, int r) {
  if (r < 0) throw std::invalid_argument("expected_kr: r must be >= 0");
  if (r >= 1) return 1.0 / (law.mu() * r);
  if (!law.nu_is_finite()) return kInfinity;
  return law.nu() / law.mu();
}

}  // namespace sievelab
