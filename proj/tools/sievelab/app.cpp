#include "sievelab/app.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sievelab/errors.hpp"
#include "sievelab/exact_engine.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/point_process.hpp"
#include "sievelab/serialize.hpp"
#include "sievelab/sieve_sim.hpp"
#include "sievelab/stats.hpp"
#include "sievelab/verify.hpp"
#include "sievelab/version.hpp"

namespace sievelab::cli {

namespace {

using nlohmann::json;

struct Common {
  std::string law = "uniform";
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  int workers = 0;
  std::string out_path;
  std::string format = "json";
};

std::uint64_t resolve_seed(const Common& common) {
  if (common.seed_given) return common.seed;
  if (const char* env = std::getenv("SIEVE_LAB_SEED")) {
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(env, &end, 0);
    if (end && *end == '\0' && end != env) return v;
    throw std::invalid_argument("SIEVE_LAB_SEED is not a valid unsigned integer");
  }
  return kDefaultSeed;
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void attach_common(CLI::App* sub, Common& common, bool with_law = true) {
  if (with_law) sub->add_option("--law", common.law, "stick law spec (e.g. uniform, beta-theta:2, beta:1.5,2.5, mixture:0.3*beta:1,1+0.7*beta:2,1, heavy:1)");
  sub->add_option("--seed", common.seed, "master seed (default 0xB5EE; env SIEVE_LAB_SEED overrides the default)")
      ->trigger_on_parse()
      ->each([&common](const std::string&) { common.seed_given = true; });
  sub->add_option("--workers", common.workers, "worker threads (0 = hardware)");
  sub->add_option("--out", common.out_path, "write output to this file instead of stdout");
  sub->add_option("--format", common.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void emit(const Common& common, const std::string& command, json data,
          const std::string& csv, std::ostream& out, std::ostream& err) {
  std::string payload;
  if (common.format == "csv") {
    payload = csv;
  } else {
    const json doc = {{"meta",
                       {{"command", command},
                        {"law", common.law},
                        {"seed", resolve_seed(common)},
                        {"version", std::string(kVersion)},
                        {"timestamp", timestamp_utc()}}},
                      {"data", std::move(data)}};
    payload = doc.dump(2);
    payload += "\n";
  }
  if (!common.out_path.empty()) {
    std::ofstream file(common.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open output file '" << common.out_path << "'\n";
      throw Error("cannot open output file");
    }
    file << payload;
  } else {
    out << payload;
  }
}

// Replicated limit-model runs with per-replicate derived streams.
template <typename Agg, typename Body>
std::vector<Agg> parallel_runs(std::uint64_t reps, int workers, std::uint64_t seed,
                               const Body& body) {
  const std::uint64_t count =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), reps);
  std::vector<Agg> partials(std::max<std::uint64_t>(count, 1));
  const auto run = [&](std::uint64_t begin, std::uint64_t end, Agg& agg) {
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream stream = RandomStream::derive(seed, i);
      body(agg, stream);
    }
  };
  if (count <= 1) {
    run(0, reps, partials[0]);
  } else {
    std::vector<std::thread> threads;
    for (std::uint64_t w = 0; w < count; ++w) {
      threads.emplace_back(run, reps * w / count, reps * (w + 1) / count,
                           std::ref(partials[w]));
    }
    for (auto& t : threads) t.join();
  }
  return partials;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bernoulli sieve occupancy laboratory"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // moments
  Common moments_common;
  int moment_a = 1, moment_b = 0;
  CLI::App* moments = app.add_subcommand("moments", "joint moment E[W^a (1-W)^b], mu and nu");
  attach_common(moments, moments_common);
  moments->add_option("--a", moment_a, "exponent of W")->check(CLI::NonNegativeNumber);
  moments->add_option("--b", moment_b, "exponent of 1-W")->check(CLI::NonNegativeNumber);

  // exact-pattern
  Common exact_common;
  int exact_n = 3, exact_kmax = 12, exact_depth = 8;
  double exact_budget = 2e7, exact_floor = 1e-16;
  CLI::App* exact = app.add_subcommand("exact-pattern",
                                       "enumerate pattern probabilities and marginals");
  attach_common(exact, exact_common);
  exact->add_option("--n", exact_n, "number of balls")->required()->check(CLI::PositiveNumber);
  exact->add_option("--kmax", exact_kmax, "maximum number of boxes")->check(CLI::PositiveNumber);
  exact->add_option("--depth", exact_depth, "occupancy marginal depth");
  exact->add_option("--budget", exact_budget, "weak-composition budget");
  exact->add_option("--prune-floor", exact_floor, "probability floor for pruning");

  // limit-pmf
  Common limit_common;
  std::vector<int> limit_parts;
  std::vector<int> limit_marginal_args;
  double limit_tol = 1e-4;
  CLI::App* limit = app.add_subcommand("limit-pmf", "limit occupancy law: joint value or marginal");
  attach_common(limit, limit_common);
  limit->add_option("--parts", limit_parts, "occupancy prefix n1,n2,...")->delimiter(',');
  limit->add_option("--marginal", limit_marginal_args,
                    "coordinate and support cap for a marginal table")
      ->expected(2);
  limit->add_option("--tol", limit_tol, "prefix truncation tolerance for marginals");

  // expected-kr
  Common kr_common;
  int kr_rmax = 2;
  CLI::App* kr = app.add_subcommand("expected-kr", "limit expectations of the r-counts");
  attach_common(kr, kr_common);
  kr->add_option("--rmax", kr_rmax, "largest r")->check(CLI::PositiveNumber);

  // simulate-sieve
  Common sieve_common;
  int sieve_n = 100;
  std::uint64_t sieve_reps = 10'000;
  std::string sieve_stat = "pattern";
  int sieve_zlen = 8, sieve_rmax = 8;
  CLI::App* sieve = app.add_subcommand("simulate-sieve", "finite-n Monte Carlo");
  attach_common(sieve, sieve_common);
  sieve->add_option("--n", sieve_n, "number of balls")->required()->check(CLI::PositiveNumber);
  sieve->add_option("--reps", sieve_reps, "replicates")->check(CLI::PositiveNumber);
  sieve->add_option("--stat", sieve_stat, "statistic: pattern|z|kr|index|occupied")
      ->check(CLI::IsMember({"pattern", "z", "kr", "index", "occupied"}));
  sieve->add_option("--zlen", sieve_zlen, "Z-prefix length");
  sieve->add_option("--rmax", sieve_rmax, "largest r for the K_{n,r} summary");

  // simulate-limit
  Common sl_common;
  std::uint64_t sl_reps = 10'000;
  int sl_depth = 0, sl_kr = 0;
  StopParams sl_stop;
  CLI::App* slimit = app.add_subcommand("simulate-limit", "limit-model Monte Carlo");
  attach_common(slimit, sl_common);
  slimit->add_option("--reps", sl_reps, "replicates")->check(CLI::PositiveNumber);
  slimit->add_option("--depth", sl_depth, "depth of the occupancy vector");
  slimit->add_option("--kr", sl_kr, "largest r for K_r^* counting");
  slimit->add_option("--stop-consecutive", sl_stop.consecutive, "stop rule: saturated gaps in a row");
  slimit->add_option("--stop-factor", sl_stop.factor, "stop rule: threshold factor");
  slimit->add_option("--gap-budget", sl_stop.gap_budget, "stop rule: gap scan budget");

  // verify
  Common verify_common;
  verify_common.law = "";
  std::string verify_suite = "basic";
  CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
  attach_common(verify, verify_common, /*with_law=*/false);
  verify->add_option("--law", verify_common.law,
                     "recorded in metadata; each check pins its own laws");
  verify->add_option("--suite", verify_suite, "basic or full")
      ->check(CLI::IsMember({"basic", "full"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (moments->parsed()) {
      const StickLaw law = StickLaw::parse(moments_common.law);
      const double m = law.joint_moment(moment_a, moment_b);
      json data = {{"a", moment_a},      {"b", moment_b},
                   {"moment", m},        {"mu", law.mu()},
                   {"nu", json_number(law.nu())}, {"mean_w", law.mean_w()}};
      char nu_text[40] = "inf";
      if (law.nu_is_finite())
        std::snprintf(nu_text, sizeof(nu_text), "%.17g", law.nu());
      char csv[256];
      std::snprintf(csv, sizeof(csv), "a,b,moment,mu,nu\n%d,%d,%.17g,%.17g,%s\n",
                    moment_a, moment_b, m, law.mu(), nu_text);
      emit(moments_common, "moments", std::move(data), csv, out, err);
      return 0;
    }

    if (exact->parsed()) {
      const StickLaw law = StickLaw::parse(exact_common.law);
      EnumerationOptions opts;
      opts.composition_budget = exact_budget;
      opts.prune_floor = exact_floor;
      const PatternPmf pmf = enumerate_finite(law, exact_n, exact_kmax, opts);
      const FiniteMarginals marginals =
          finite_marginals(law, exact_n, exact_kmax, exact_depth, opts);
      json data = {{"pmf", to_json(pmf)}, {"marginals", to_json(marginals)}};
      emit(exact_common, "exact-pattern", std::move(data), to_csv(pmf), out, err);
      return 0;
    }

    if (limit->parsed()) {
      const StickLaw law = StickLaw::parse(limit_common.law);
      if (!limit_parts.empty()) {
        const double p = limit_pmf(law, std::span<const int>(limit_parts));
        json data = {{"parts", limit_parts}, {"probability", p}};
        char csv[128];
        std::snprintf(csv, sizeof(csv), "probability\n%.17g\n", p);
        emit(limit_common, "limit-pmf", std::move(data), csv, out, err);
        return 0;
      }
      if (limit_marginal_args.size() == 2) {
        const LimitMarginal marginal = limit_marginal(
            law, limit_marginal_args[0], limit_marginal_args[1], limit_tol);
        emit(limit_common, "limit-pmf", to_json(marginal), to_csv(marginal), out, err);
        return 0;
      }
      err << "error: limit-pmf needs either --parts or --marginal\n";
      return 1;
    }

    if (kr->parsed()) {
      const StickLaw law = StickLaw::parse(kr_common.law);
      json values = json::array();
      std::string csv = "r,expected\n";
      for (int r = 0; r <= kr_rmax; ++r) {
        const double v = expected_kr(law, r);
        values.push_back(json_number(v));
        csv += std::to_string(r) + "," +
               (std::isinf(v) ? std::string("inf") : std::to_string(v)) + "\n";
      }
      json data = {{"rmax", kr_rmax}, {"values", std::move(values)}};
      emit(kr_common, "expected-kr", std::move(data), csv, out, err);
      return 0;
    }

    if (sieve->parsed()) {
      const StickLaw law = StickLaw::parse(sieve_common.law);
      SieveStatistic stat = SieveStatistic::Pattern;
      if (sieve_stat == "z") stat = SieveStatistic::ZPrefix;
      if (sieve_stat == "kr") stat = SieveStatistic::RCounts;
      if (sieve_stat == "index") stat = SieveStatistic::LeftmostIndex;
      if (sieve_stat == "occupied") stat = SieveStatistic::OccupiedCount;
      ReplicateOptions opts;
      opts.workers = resolve_workers(sieve_common.workers);
      opts.z_prefix_length = sieve_zlen;
      opts.r_count_max = sieve_rmax;
      const ReplicateResult result = replicate(law, sieve_n, sieve_reps,
                                               resolve_seed(sieve_common), stat, opts);
      json data = {{"n", sieve_n},
                   {"replicates", sieve_reps},
                   {"statistic", sieve_stat},
                   {"pattern_key_truncated", result.pattern_key_truncated},
                   {"empirical", to_json(result.pmf)},
                   {"r_counts", to_json(result.r_counts)}};
      emit(sieve_common, "simulate-sieve", std::move(data), to_csv(result.pmf), out, err);
      return 0;
    }

    if (slimit->parsed()) {
      const StickLaw law = StickLaw::parse(sl_common.law);
      const std::uint64_t seed = resolve_seed(sl_common);
      const int workers = resolve_workers(sl_common.workers);
      if ((sl_depth > 0) == (sl_kr > 0)) {
        err << "error: simulate-limit needs exactly one of --depth or --kr\n";
        return 1;
      }
      if (sl_depth > 0) {
        struct Agg {
          std::map<std::vector<int>, std::uint64_t> counts;
        };
        const auto partials = parallel_runs<Agg>(
            sl_reps, workers, seed, [&](Agg& agg, RandomStream& stream) {
              const auto z = sample_limit_Z(law, stream, sl_depth);
              std::vector<int> key(z.begin(), z.end());
              agg.counts[key] += 1;
            });
        EmpiricalPmf pmf;
        pmf.replicates = sl_reps;
        for (const auto& p : partials)
          for (const auto& [key, count] : p.counts) pmf.counts[key] += count;
        json data = {{"depth", sl_depth},
                     {"replicates", sl_reps},
                     {"empirical", to_json(pmf)}};
        emit(sl_common, "simulate-limit", std::move(data), to_csv(pmf), out, err);
        return 0;
      }

      struct Agg {
        std::vector<std::int64_t> sum, sum_sq;
        std::int64_t gaps = 0;
      };
      const auto partials = parallel_runs<Agg>(
          sl_reps, workers, seed, [&](Agg& agg, RandomStream& stream) {
            if (agg.sum.empty()) {
              agg.sum.assign(static_cast<std::size_t>(sl_kr) + 1, 0);
              agg.sum_sq.assign(static_cast<std::size_t>(sl_kr) + 1, 0);
            }
            const LimitKrSample sample = sample_limit_Kr(law, stream, sl_kr, sl_stop);
            for (int r = 0; r <= sl_kr; ++r) {
              const std::int64_t k = sample.counts[static_cast<std::size_t>(r)];
              agg.sum[static_cast<std::size_t>(r)] += k;
              agg.sum_sq[static_cast<std::size_t>(r)] += k * k;
            }
            agg.gaps += sample.diagnostics.gaps_scanned;
          });
      json rows = json::array();
      std::string csv = "r,mean,se\n";
      std::int64_t gaps_total = 0;
      for (const auto& p : partials) gaps_total += p.gaps;
      for (int r = 0; r <= sl_kr; ++r) {
        std::int64_t sum = 0, sum_sq = 0;
        for (const auto& p : partials) {
          if (p.sum.empty()) continue;
          sum += p.sum[static_cast<std::size_t>(r)];
          sum_sq += p.sum_sq[static_cast<std::size_t>(r)];
        }
        const bool marker = r == 0 && !law.nu_is_finite();
        const double mean = static_cast<double>(sum) / static_cast<double>(sl_reps);
        const double var = static_cast<double>(sum_sq) / static_cast<double>(sl_reps) -
                           mean * mean;
        const double se = std::sqrt(std::max(0.0, var) / static_cast<double>(sl_reps));
        rows.push_back({{"r", r},
                        {"mean", marker ? json("inf") : json(mean)},
                        {"se", marker ? json("inf") : json(se)}});
        csv += std::to_string(r) + "," + (marker ? "inf" : std::to_string(mean)) + "," +
               (marker ? "inf" : std::to_string(se)) + "\n";
      }
      json data = {{"rmax", sl_kr},
                   {"replicates", sl_reps},
                   {"mean_gaps_scanned",
                    static_cast<double>(gaps_total) / static_cast<double>(sl_reps)},
                   {"stop", {{"consecutive", sl_stop.consecutive},
                             {"factor", sl_stop.factor},
                             {"gap_budget", sl_stop.gap_budget}}},
                   {"rows", std::move(rows)}};
      emit(sl_common, "simulate-limit", std::move(data), csv, out, err);
      return 0;
    }

    if (verify->parsed()) {
      VerifyOptions options;
      options.seed = resolve_seed(verify_common);
      options.workers = resolve_workers(verify_common.workers);
      options.suite = verify_suite == "full" ? VerifySuite::Full : VerifySuite::Basic;
      const std::vector<CheckResult> results = run_verification(options);
      for (const auto& r : results) {
        char line[160];
        std::snprintf(line, sizeof(line), "criterion %2d [%s] %s (%.2fs)\n",
                      r.criterion, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                      r.seconds);
        err << line;
      }
      std::string csv = "criterion,name,pass\n";
      for (const auto& r : results)
        csv += std::to_string(r.criterion) + "," + r.name + "," +
               (r.pass ? "1" : "0") + "\n";
      emit(verify_common, "verify", verification_report(results, options), csv, out,
           err);
      return all_passed(results) ? 0 : 1;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sievelab::cli
