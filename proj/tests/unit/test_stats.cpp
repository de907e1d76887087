#include <doctest.h>

#include <cmath>
#include <vector>

#include "sievelab/errors.hpp"
#include "sievelab/rng.hpp"
#include "sievelab/stats.hpp"

using namespace sievelab;

namespace {

DiscretePmf random_pmf(RandomStream& rng, int cells) {
  DiscretePmf pmf;
  double total = 0.0;
  std::vector<double> raw(static_cast<std::size_t>(cells));
  for (auto& v : raw) {
    v = rng.next_unit();
    total += v;
  }
  for (int i = 0; i < cells; ++i) pmf[{i}] = raw[static_cast<std::size_t>(i)] / total;
  return pmf;
}

}  // namespace

TEST_CASE("tv distance basics") {
  DiscretePmf p{{{0}, 0.5}, {{1}, 0.5}};
  DiscretePmf q{{{0}, 0.25}, {{1}, 0.75}};
  CHECK(tv_distance(p, p).distance == doctest::Approx(0.0));
  CHECK(tv_distance(p, q).distance == doctest::Approx(0.25).epsilon(1e-12));

  DiscretePmf da{{{0}, 1.0}};
  DiscretePmf db{{{1}, 1.0}};
  CHECK(tv_distance(da, db).distance == doctest::Approx(1.0).epsilon(1e-12));

  // Excluded mass is reported and enters as half the difference.
  DiscretePmf truncated{{{0}, 0.5}, {{1}, 0.3}};  // 0.2 missing
  const TvResult r = tv_distance(p, truncated);
  CHECK(r.excluded_left == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.excluded_right == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.distance == doctest::Approx(0.5 * 0.2 + 0.5 * 0.2).epsilon(1e-12));

  CHECK_THROWS_AS(
      tv_distance(p, q, [](const std::vector<int>&) { return false; }), Error);
}

TEST_CASE("tv distance is symmetric and satisfies the triangle inequality") {
  RandomStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscretePmf a = random_pmf(rng, 6);
    const DiscretePmf b = random_pmf(rng, 6);
    const DiscretePmf c = random_pmf(rng, 6);
    const double ab = tv_distance(a, b).distance;
    const double ba = tv_distance(b, a).distance;
    const double ac = tv_distance(a, c).distance;
    const double cb = tv_distance(c, b).distance;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
  }
}

TEST_CASE("chi-square: exact match and gross mismatch") {
  DiscretePmf expected{{{0}, 0.5}, {{1}, 0.3}, {{2}, 0.2}};
  EmpiricalPmf observed;
  observed.replicates = 1000;
  observed.counts[{0}] = 500;
  observed.counts[{1}] = 300;
  observed.counts[{2}] = 200;
  const ComparisonReport exact = chi_square_gof(observed, expected);
  CHECK(exact.chi_square == doctest::Approx(0.0));
  CHECK(exact.p_value == doctest::Approx(1.0));
  CHECK(exact.df == 2);

  DiscretePmf uniform10;
  for (int i = 0; i < 10; ++i) uniform10[{i}] = 0.1;
  EmpiricalPmf lopsided;
  lopsided.replicates = 1000;
  lopsided.counts[{0}] = 1000;
  const ComparisonReport gross = chi_square_gof(lopsided, uniform10);
  CHECK(gross.p_value < 1e-10);
  CHECK(gross.p_value >= 1e-300);
}

TEST_CASE("chi-square: pooling and degenerate cells") {
  DiscretePmf expected{{{0}, 0.70}, {{1}, 0.298}, {{2}, 0.001}, {{3}, 0.001}};
  EmpiricalPmf observed;
  observed.replicates = 1000;
  observed.counts[{0}] = 700;
  observed.counts[{1}] = 297;
  observed.counts[{2}] = 1;
  observed.counts[{7}] = 2;  // outside the expected support
  const ComparisonReport report = chi_square_gof(observed, expected);
  // The two tiny cells and the stray key pool into one tail cell.
  CHECK(report.cells.size() == 3);
  CHECK(report.cells.back().pooled);
  CHECK(report.cells.back().observed_count == doctest::Approx(3.0));
  CHECK(report.p_value > 0.001);

  EmpiricalPmf tiny;
  tiny.replicates = 4;
  tiny.counts[{0}] = 4;
  DiscretePmf one{{{0}, 1.0}};
  CHECK_THROWS_AS(chi_square_gof(tiny, one), Error);
}

TEST_CASE("chi-square p-value decreases as a discrepancy scales up") {
  DiscretePmf expected{{{0}, 0.5}, {{1}, 0.5}};
  double prev = 1.0;
  for (const int shift : {5, 10, 20, 40}) {
    EmpiricalPmf observed;
    observed.replicates = 1000;
    observed.counts[{0}] = static_cast<std::uint64_t>(500 + shift);
    observed.counts[{1}] = static_cast<std::uint64_t>(500 - shift);
    const ComparisonReport report = chi_square_gof(observed, expected);
    CHECK(report.p_value < prev);
    CHECK(report.p_value >= 0.0);
    CHECK(report.p_value <= 1.0);
    prev = report.p_value;
  }
}

TEST_CASE("chi-square p-values are uniform under the null") {
  // Calibration: 200 meta-replicates of sampling the true pmf; the
  // resulting p-values must look uniform on [0,1].
  const DiscretePmf truth{{{0}, 0.30}, {{1}, 0.25}, {{2}, 0.20},
                          {{3}, 0.10}, {{4}, 0.10}, {{5}, 0.05}};
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& [key, mass] : truth) {
    acc += mass;
    cumulative.push_back(acc);
  }
  std::vector<double> p_values;
  for (int meta = 0; meta < 200; ++meta) {
    RandomStream rng = RandomStream::derive(1234, static_cast<std::uint64_t>(meta));
    EmpiricalPmf observed;
    observed.replicates = 2000;
    for (int i = 0; i < 2000; ++i) {
      const double u = rng.next_unit();
      int cell = 0;
      while (u > cumulative[static_cast<std::size_t>(cell)]) ++cell;
      observed.counts[{cell}] += 1;
    }
    p_values.push_back(chi_square_gof(observed, truth).p_value);
  }
  const KsResult ks = ks_test(std::move(p_values), [](double x) {
    return std::min(1.0, std::max(0.0, x));
  });
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("ks tests detect location shifts and accept the null") {
  RandomStream rng(9);
  std::vector<double> uniform_sample;
  for (int i = 0; i < 20'000; ++i) uniform_sample.push_back(rng.next_unit());
  const KsResult ok = ks_test(uniform_sample, [](double x) {
    return std::min(1.0, std::max(0.0, x));
  });
  CHECK(ok.p_value > 0.001);

  std::vector<double> shifted;
  for (int i = 0; i < 20'000; ++i) shifted.push_back(0.8 * rng.next_unit());
  const KsResult bad = ks_test(shifted, [](double x) {
    return std::min(1.0, std::max(0.0, x));
  });
  CHECK(bad.p_value < 1e-6);

  std::vector<double> a, b;
  for (int i = 0; i < 15'000; ++i) {
    a.push_back(rng.next_exponential());
    b.push_back(rng.next_exponential());
  }
  CHECK(ks_test_two_sample(std::move(a), std::move(b)).p_value > 0.001);
}

TEST_CASE("convergence tables") {
  const std::vector<ConvergencePoint> good = {
      {10, 1.3, 0.01}, {100, 1.1, 0.01}, {1000, 1.05, 0.01}};
  const ConvergenceTable t1 = convergence_table(good, 1.0);
  CHECK(t1.monotone);
  CHECK(!t1.divergence_mode);
  CHECK(t1.rows[0].gap == doctest::Approx(0.3));

  const std::vector<ConvergencePoint> bad = {{10, 1.3, 0.01}, {100, 1.4, 0.01}};
  CHECK(!convergence_table(bad, 1.0).monotone);

  // Infinite target: gaps become the raw estimates, flag = strictly rising.
  const std::vector<ConvergencePoint> growing = {
      {10, 2.0, 0.1}, {100, 3.0, 0.1}, {1000, 5.0, 0.1}};
  const ConvergenceTable t2 =
      convergence_table(growing, std::numeric_limits<double>::infinity());
  CHECK(t2.divergence_mode);
  CHECK(t2.monotone);
  CHECK(t2.rows[2].gap == doctest::Approx(5.0));

  const std::vector<ConvergencePoint> flat = {{10, 2.0, 0.1}, {100, 2.0, 0.1}};
  CHECK(!convergence_table(flat, std::numeric_limits<double>::infinity()).monotone);

  const std::vector<ConvergencePoint> single = {{10, 1.0, 0.1}};
  CHECK_THROWS_AS(convergence_table(single, 1.0), Error);
}
