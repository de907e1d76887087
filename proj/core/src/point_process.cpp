#include "sievelab/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sievelab/errors.hpp"

namespace sievelab {

namespace {

double abs_log_w(const StickLaw& law, RandomStream& rng) {
  return -std::log(law.sample_w(rng));
}

// Gap lengths can exceed any fixed bound during a K_r scan; above this the
// chance of at most a few hundred points is far below double resolution,
// so the scan may treat the gap as saturated without sampling.
constexpr double kSaturatedGapLength = 1e7;

}  // namespace

RenewalWindow RenewalWindow::build(const StickLaw& law, RandomStream& rng,
                                   double x_lo, double x_hi) {
  if (!(0.0 < x_lo) || !(x_lo < x_hi))
    throw std::invalid_argument("renewal window: need 0 < x_lo < x_hi");
  RenewalWindow w;
  w.x_lo_ = x_lo;
  w.x_hi_ = x_hi;
  w.anchor_ = -std::log(x_hi);
  w.forward_part_ = -std::log(law.sample_w0(rng));
  w.epochs_.push_back(w.anchor_ + w.forward_part_);
  const double s_end = -std::log(x_lo);
  while (w.epochs_.back() <= s_end) {
    w.epochs_.push_back(w.epochs_.back() + abs_log_w(law, rng));
  }
  return w;
}

std::vector<double> RenewalWindow::points() const {
  std::vector<double> out;
  // Epochs ascend in s, so x = exp(-s) descends; collect then reverse.
  for (const double s : epochs_) {
    const double x = std::exp(-s);
    if (x >= x_lo_ && x <= x_hi_) out.push_back(x);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void RenewalWindow::extend_below(const StickLaw& law, RandomStream& rng,
                                 double new_x_lo) {
  if (!(0.0 < new_x_lo)) throw std::invalid_argument("renewal window: x_lo must be > 0");
  if (new_x_lo >= x_lo_) return;
  const double s_end = -std::log(new_x_lo);
  while (epochs_.back() <= s_end) {
    epochs_.push_back(epochs_.back() + abs_log_w(law, rng));
  }
  x_lo_ = new_x_lo;
}

void RenewalWindow::extend_above(const StickLaw& law, RandomStream& rng,
                                 double new_x_hi) {
  if (new_x_hi <= x_hi_) return;
  const double s_min = -std::log(new_x_hi);
  if (!left_resolved_) {
    // Straddling spacing: total length conditioned to exceed the realized
    // forward part.
    const double spacing = law.sample_abs_log_w_above(rng, forward_part_);
    epochs_.push_front(anchor_ + forward_part_ - spacing);
    left_resolved_ = true;
  }
  while (epochs_.front() > s_min) {
    epochs_.push_front(epochs_.front() - abs_log_w(law, rng));
  }
  x_hi_ = new_x_hi;
}

GapOccupancy gap_counts(std::span<const double> atoms, std::span<const double> pts) {
  GapOccupancy out;
  if (atoms.size() < 2) return out;

  std::size_t i = 0;
  while (i < pts.size() && pts[i] < atoms.front()) ++i;
  for (std::size_t g = 0; g + 1 < atoms.size(); ++g) {
    const double lo = atoms[g];
    const double hi = atoms[g + 1];
    std::int64_t count = 0;
    while (i < pts.size() && pts[i] < hi) {
      if (pts[i] == lo || pts[i] == hi)
        throw DataError("gap_counts: coincident stream and window points");
      if (pts[i] > lo) ++count;
      ++i;
    }
    if (i < pts.size() && pts[i] == hi)
      throw DataError("gap_counts: coincident stream and window points");
    out.gaps.push_back({lo, hi, count});
  }
  return out;
}

GapOccupancy gap_counts(const RenewalWindow& window, const PoissonStream& stream) {
  const std::vector<double> atoms = window.points();
  return gap_counts(atoms, stream.points());
}

namespace {

// The gap of the limit process that contains an independent point y, plus
// the machinery to walk further gaps rightward. Stationarity on the log
// scale makes anchoring at -log y valid.
struct GapWalk {
  double lo;  // left end of the current gap
  double hi;  // right end of the current gap

  static GapWalk open_at(const StickLaw& law, RandomStream& rng, double y) {
    const double forward = -std::log(law.sample_w0(rng));
    const double total = law.sample_abs_log_w_above(rng, forward);
    const double lo = y * std::exp(-forward);
    return GapWalk{lo, lo * std::exp(total)};
  }

  void advance(const StickLaw& law, RandomStream& rng) {
    lo = hi;
    hi = hi / law.sample_w(rng);
  }
};

}  // namespace

std::vector<std::int64_t> sample_limit_Z(const StickLaw& law, RandomStream& rng,
                                         int depth) {
  if (depth < 1) throw std::invalid_argument("sample_limit_Z: depth must be >= 1");
  const double y = rng.next_exponential();
  GapWalk gap = GapWalk::open_at(law, rng, y);

  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(depth));
  // Y itself plus the Poisson count of the rest of its gap.
  counts.push_back(1 + rng.next_poisson(gap.hi - y));
  for (int i = 1; i < depth; ++i) {
    gap.advance(law, rng);
    counts.push_back(rng.next_poisson(gap.hi - gap.lo));
  }
  return counts;
}

LimitKrSample sample_limit_Kr(const StickLaw& law, RandomStream& rng, int r_max,
                              const StopParams& stop) {
  if (r_max < 1) throw std::invalid_argument("sample_limit_Kr: r_max must be >= 1");
  if (stop.consecutive < 1 || stop.factor < 1 || stop.gap_budget < 1)
    throw std::invalid_argument("sample_limit_Kr: invalid stop parameters");

  LimitKrSample out;
  out.counts.assign(static_cast<std::size_t>(r_max) + 1, 0);
  out.k0_infinite = !law.nu_is_finite();

  const std::int64_t threshold =
      static_cast<std::int64_t>(stop.factor) * static_cast<std::int64_t>(r_max);

  const double y = rng.next_exponential();
  GapWalk gap = GapWalk::open_at(law, rng, y);

  int run = 0;
  long long scanned = 0;
  bool first = true;
  for (;;) {
    ++scanned;
    if (scanned > stop.gap_budget) {
      throw BudgetError("sample_limit_Kr: stop rule not triggered within gap budget",
                        static_cast<double>(scanned),
                        static_cast<double>(stop.gap_budget));
    }
    const double length = first ? gap.hi - y : gap.hi - gap.lo;
    std::int64_t count;
    if (length > kSaturatedGapLength) {
      count = threshold + 1;
    } else {
      count = rng.next_poisson(length);
      if (first) count += 1;  // Y itself
    }
    if (count <= r_max) {
      // Empty gaps only count strictly to the right of Y's gap; the first
      // gap holds Y, so its full count is at least 1 anyway.
      if (!(count == 0 && out.k0_infinite)) {
        out.counts[static_cast<std::size_t>(count)] += 1;
      }
    }
    run = count > threshold ? run + 1 : 0;
    if (run >= stop.consecutive) {
      out.diagnostics = {scanned, gap.hi, run, true};
      return out;
    }
    first = false;
    gap.advance(law, rng);
    if (!(gap.hi > 0.0) || gap.hi > 1e300) {
      throw NumericalError("sample_limit_Kr: gap endpoint overflow", gap.hi);
    }
  }
}

namespace detail {

long long stop_scan_index(std::span<const std::int64_t> counts, int r_max,
                          const StopParams& stop) {
  const std::int64_t threshold =
      static_cast<std::int64_t>(stop.factor) * static_cast<std::int64_t>(r_max);
  int run = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    run = counts[i] > threshold ? run + 1 : 0;
    if (run >= stop.consecutive) return static_cast<long long>(i) + 1;
  }
  return -1;
}

}  // namespace detail

}  // namespace sievelab
