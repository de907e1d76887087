#pragma once

#include <cmath>
#include <limits>

namespace sievelab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Neumaier compensated summation; keeps aggregation of many small masses
// accurate to a few ulps regardless of ordering.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace sievelab
