#include "sievelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/special_functions.hpp"

namespace sievelab {

DiscretePmf to_pmf(const EmpiricalPmf& empirical) {
  DiscretePmf out;
  const double reps = static_cast<double>(empirical.replicates);
  for (const auto& [key, count] : empirical.counts)
    out.emplace(key, static_cast<double>(count) / reps);
  return out;
}

DiscretePmf to_pmf(const PatternPmf& pmf) {
  DiscretePmf out;
  for (const auto& [pattern, mass] : pmf.entries) out.emplace(pattern.parts(), mass);
  return out;
}

DiscretePmf to_pmf(const MarginalTable& table) {
  DiscretePmf out;
  for (const auto& [value, mass] : table.pmf) out.emplace(std::vector<int>{value}, mass);
  return out;
}

TvResult tv_distance(const DiscretePmf& p, const DiscretePmf& q,
                     const std::function<bool(const std::vector<int>&)>& keep) {
  std::set<std::vector<int>> keys;
  for (const auto& [key, mass] : p)
    if (!keep || keep(key)) keys.insert(key);
  for (const auto& [key, mass] : q)
    if (!keep || keep(key)) keys.insert(key);
  if (keys.empty()) throw Error("tv_distance: empty common support after restriction");

  const auto mass_of = [](const DiscretePmf& pmf, const std::vector<int>& key) {
    const auto it = pmf.find(key);
    return it == pmf.end() ? 0.0 : it->second;
  };

  NeumaierSum core;
  NeumaierSum kept_p;
  NeumaierSum kept_q;
  for (const auto& key : keys) {
    const double a = mass_of(p, key);
    const double b = mass_of(q, key);
    core.add(std::abs(a - b));
    kept_p.add(a);
    kept_q.add(b);
  }
  TvResult result;
  result.excluded_left = std::max(0.0, 1.0 - kept_p.value());
  result.excluded_right = std::max(0.0, 1.0 - kept_q.value());
  result.distance = 0.5 * core.value() +
                    0.5 * std::abs(result.excluded_left - result.excluded_right);
  return result;
}

ComparisonReport chi_square_gof(const EmpiricalPmf& observed,
                                const DiscretePmf& expected, double min_expected,
                                double expected_tail_bound) {
  if (observed.replicates == 0) throw Error("chi_square_gof: no observations");
  const double reps = static_cast<double>(observed.replicates);

  ComparisonReport report;
  report.replicates = observed.replicates;
  report.min_expected = min_expected;
  report.expected_tail_bound = expected_tail_bound;

  // Everything outside the enumerated expected support pools into one tail
  // cell: unlisted expected mass on one side, stray observed keys on the
  // other; nothing is silently dropped.
  NeumaierSum listed_expected;
  for (const auto& [key, mass] : expected) listed_expected.add(mass);
  double pool_expected = std::max(0.0, 1.0 - listed_expected.value()) * reps;
  double pool_observed = 0.0;

  NeumaierSum observed_in_support;
  for (const auto& [key, count] : observed.counts) {
    if (expected.find(key) == expected.end()) {
      pool_observed += static_cast<double>(count);
    } else {
      observed_in_support.add(static_cast<double>(count));
    }
  }

  std::vector<ComparisonReport::Cell> kept;
  for (const auto& [key, mass] : expected) {
    const double exp_count = mass * reps;
    const auto it = observed.counts.find(key);
    const double obs_count = it == observed.counts.end()
                                 ? 0.0
                                 : static_cast<double>(it->second);
    if (exp_count < min_expected) {
      pool_expected += exp_count;
      pool_observed += obs_count;
    } else {
      kept.push_back({key, exp_count, obs_count, false});
    }
  }
  const bool has_pool = pool_expected > 0.0 || pool_observed > 0.0;
  if (has_pool) kept.push_back({{}, pool_expected, pool_observed, true});
  if (kept.size() < 2)
    throw Error("chi_square_gof: fewer than two cells after pooling");

  NeumaierSum stat;
  for (const auto& cell : kept) {
    if (cell.expected_count <= 0.0) {
      if (cell.observed_count > 0.0) stat.add(kInfinity);
      continue;
    }
    const double d = cell.observed_count - cell.expected_count;
    stat.add(d * d / cell.expected_count);
  }
  report.cells = std::move(kept);
  report.chi_square = stat.value();
  report.df = static_cast<int>(report.cells.size()) - 1;
  if (std::isfinite(report.chi_square)) {
    report.p_value = std::max(
        1e-300, sf::reg_gamma_upper(0.5 * report.df, 0.5 * report.chi_square));
  } else {
    report.p_value = 1e-300;
  }

  // Compare on the expected support; mass outside it on either side enters
  // through the excluded-mass term rather than cell by cell.
  const TvResult tv =
      tv_distance(to_pmf(observed), expected,
                  [&expected](const std::vector<int>& key) {
                    return expected.find(key) != expected.end();
                  });
  report.tv_distance = tv.distance;
  report.observed_excluded = tv.excluded_left;
  report.expected_excluded = tv.excluded_right;
  return report;
}

namespace {

double ks_p_value(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return sf::kolmogorov_tail((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error("ks_test: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error("ks_test_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  const double effective = na * nb / (na + nb);
  return {d, ks_p_value(d, effective)};
}

ConvergenceTable convergence_table(std::span<const ConvergencePoint> points,
                                   double target) {
  if (points.size() < 2) throw Error("convergence_table: need at least two rows");
  ConvergenceTable table;
  table.divergence_mode = std::isinf(target);
  for (const auto& p : points) {
    const double gap = table.divergence_mode ? p.estimate : std::abs(p.estimate - target);
    table.rows.push_back({p.n, p.estimate, p.se, gap});
  }
  table.monotone = true;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    if (table.divergence_mode) {
      if (!(table.rows[i + 1].gap > table.rows[i].gap)) table.monotone = false;
    } else {
      if (!(table.rows[i + 1].gap <= table.rows[i].gap)) table.monotone = false;
    }
  }
  return table;
}

}  // namespace sievelab
