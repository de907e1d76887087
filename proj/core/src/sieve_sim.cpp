#include "sievelab/sieve_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace sievelab {

SieveOutcome simulate_outcome(const StickLaw& law, int n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("simulate_outcome: n must be >= 1");
  SieveOutcome out;
  out.n = n;
  out.box_counts.reserve(16);
  std::int64_t remaining = n;
  while (remaining > 0) {
    const double w = law.sample_w(rng);
    const std::int64_t c = rng.next_binomial(remaining, 1.0 - w);
    out.box_counts.push_back(static_cast<int>(c));
    remaining -= c;
  }
  return out;
}

double EmpiricalPmf::standard_error(const std::vector<int>& key) const {
  const double p = frequency(key);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(replicates));
}

void EmpiricalPmf::merge(const EmpiricalPmf& other) {
  for (const auto& [key, count] : other.counts) counts[key] += count;
  replicates += other.replicates;
}

double KrSummary::standard_error(int r) const {
  const double reps = static_cast<double>(replicates);
  const double m = mean(r);
  const double var =
      static_cast<double>(sum_sq[static_cast<std::size_t>(r)]) / reps - m * m;
  return std::sqrt(std::max(0.0, var) / reps);
}

namespace {

std::vector<int> statistic_key(const SieveOutcome& outcome, SieveStatistic stat,
                               const ReplicateOptions& opts, bool truncate_pattern) {
  switch (stat) {
    case SieveStatistic::Pattern:
      if (truncate_pattern) return outcome.z_prefix(opts.z_prefix_length);
      return std::vector<int>(outcome.box_counts.rbegin(), outcome.box_counts.rend());
    case SieveStatistic::ZPrefix:
      return outcome.z_prefix(opts.z_prefix_length);
    case SieveStatistic::RCounts: {
      std::vector<int> key(static_cast<std::size_t>(opts.r_count_max) + 1);
      for (int r = 0; r <= opts.r_count_max; ++r)
        key[static_cast<std::size_t>(r)] = outcome.r_count(r);
      return key;
    }
    case SieveStatistic::LeftmostIndex:
      return {outcome.leftmost_index()};
    case SieveStatistic::OccupiedCount:
      return {outcome.occupied_count()};
  }
  return {};
}

}  // namespace

ReplicateResult replicate(const StickLaw& law, int n, std::uint64_t replicates,
                          std::uint64_t seed, SieveStatistic statistic,
                          const ReplicateOptions& options) {
  if (replicates < 1) throw std::invalid_argument("replicate: need replicates >= 1");
  int workers = options.workers;
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  const std::uint64_t worker_count =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), replicates);

  const bool truncate_pattern = statistic == SieveStatistic::Pattern &&
                                n > options.full_pattern_max_n;
  const std::size_t kr_size = static_cast<std::size_t>(options.r_count_max) + 1;

  struct WorkerAggregate {
    EmpiricalPmf pmf;
    std::vector<std::int64_t> kr_sum;
    std::vector<std::int64_t> kr_sum_sq;
  };
  std::vector<WorkerAggregate> partials(worker_count);
  for (auto& p : partials) {
    p.kr_sum.assign(kr_size, 0);
    p.kr_sum_sq.assign(kr_size, 0);
  }

  const auto run_range = [&](std::uint64_t begin, std::uint64_t end,
                             WorkerAggregate& agg) {
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream stream = RandomStream::derive(seed, i);
      const SieveOutcome outcome = simulate_outcome(law, n, stream);
      agg.pmf.counts[statistic_key(outcome, statistic, options, truncate_pattern)] += 1;
      agg.pmf.replicates += 1;
      for (int r = 0; r <= options.r_count_max; ++r) {
        const std::int64_t k = outcome.r_count(r);
        agg.kr_sum[static_cast<std::size_t>(r)] += k;
        agg.kr_sum_sq[static_cast<std::size_t>(r)] += k * k;
      }
    }
  };

  if (worker_count == 1) {
    run_range(0, replicates, partials[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(worker_count);
    for (std::uint64_t w = 0; w < worker_count; ++w) {
      const std::uint64_t begin = replicates * w / worker_count;
      const std::uint64_t end = replicates * (w + 1) / worker_count;
      threads.emplace_back(run_range, begin, end, std::ref(partials[w]));
    }
    for (auto& t : threads) t.join();
  }

  ReplicateResult result;
  result.n = n;
  result.seed = seed;
  result.statistic = statistic;
  result.pattern_key_truncated = truncate_pattern;
  result.r_counts.sum.assign(kr_size, 0);
  result.r_counts.sum_sq.assign(kr_size, 0);
  for (auto& p : partials) {
    result.pmf.merge(p.pmf);
    for (std::size_t r = 0; r < kr_size; ++r) {
      result.r_counts.sum[r] += p.kr_sum[r];
      result.r_counts.sum_sq[r] += p.kr_sum_sq[r];
    }
  }
  result.r_counts.replicates = replicates;
  return result;
}

}  // namespace sievelab
