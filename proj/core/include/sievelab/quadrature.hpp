#pragma once

#include <functional>
#include <string>

namespace sievelab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long long subdivisions = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod 15(7) on a finite interval, splitting the
// worst segment first. Nodes are interior, so integrable endpoint
// singularities (log and power factors) are handled by refinement alone.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lo, double hi, double abs_tol,
                                    long long max_subdivisions = 10'000);

// Same, but throws NumericalError carrying the achieved estimate when the
// subdivision budget runs out before reaching abs_tol.
double integrate_or_throw(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol,
                          long long max_subdivisions = 10'000,
                          const std::string& context = "quadrature");

}  // namespace sievelab
