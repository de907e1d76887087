#pragma once

#include <cstdint>

// Self-contained special functions. Everything here is deterministic and
// thread-safe (no errno, no signgam), which the samplers and the moment
// machinery rely on.
namespace sievelab::sf {

// log Gamma(x) for x > 0 (Lanczos, ~1e-13 relative).
double log_gamma(double x);

// Digamma psi(x) for x > 0 (recurrence + asymptotic series, ~1e-13).
double digamma(double x);

double log_beta(double a, double b);

// log C(n, k) for 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

// Upper regularized gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double reg_gamma_upper(double s, double x);

// Kolmogorov distribution tail Q_KS(lambda) = P{sup |B| > lambda}.
double kolmogorov_tail(double lambda);

}  // namespace sievelab::sf
