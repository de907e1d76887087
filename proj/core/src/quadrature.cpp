#include "sievelab/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"

namespace sievelab {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi;
  double value;
  double error;
};

struct SegmentWorse {
  bool operator()(const Segment& a, const Segment& b) const {
    return a.error < b.error;
  }
};

Segment evaluate(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const double fc = f(center);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  double fv_low[7], fv_high[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv_low[j] = f1;
    fv_high[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv_low[j] - mean) + std::abs(fv_high[j] - mean));
  }
  resasc *= half;
  resabs *= half;

  const double value = resk * half;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double round = 50.0 * 2.2e-16 * resabs;
  err = std::max(err, round);
  if (!std::isfinite(value)) {
    throw NumericalError("integrand evaluated to a non-finite value", err);
  }
  return Segment{lo, hi, value, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lo, double hi, double abs_tol,
                                    long long max_subdivisions) {
  QuadratureResult result;
  if (lo == hi) {
    result.converged = true;
    return result;
  }

  std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> queue;
  queue.push(evaluate(f, lo, hi));
  double total_error = queue.top().error;
  double total_value = queue.top().value;

  long long splits = 0;
  while (total_error > abs_tol && splits < max_subdivisions) {
    const Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval already at the resolution of doubles; accept it as is.
      total_error -= worst.error;
      total_value += 0.0;
      queue.push(Segment{worst.lo, worst.hi, worst.value, 0.0});
      continue;
    }
    const Segment left = evaluate(f, worst.lo, mid);
    const Segment right = evaluate(f, mid, worst.hi);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++splits;
  }

  // Re-sum all segments with compensation for the final value.
  NeumaierSum value_sum;
  NeumaierSum error_sum;
  while (!queue.empty()) {
    value_sum.add(queue.top().value);
    error_sum.add(queue.top().error);
    queue.pop();
  }
  result.value = value_sum.value();
  result.error_estimate = error_sum.value();
  result.subdivisions = splits;
  result.converged = result.error_estimate <= abs_tol;
  (void)total_value;
  return result;
}

double integrate_or_throw(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol, long long max_subdivisions,
                          const std::string& context) {
  const QuadratureResult r = integrate_adaptive(f, lo, hi, abs_tol, max_subdivisions);
  if (!r.converged) {
    throw NumericalError(context + ": quadrature did not converge within " +
                             std::to_string(max_subdivisions) + " subdivisions",
                         r.error_estimate);
  }
  return r.value;
}

}  // namespace sievelab
