#include <doctest.h>

#include <cmath>

#include "sievelab/numeric.hpp"
#include "sievelab/quadrature.hpp"
#include "sievelab/special_functions.hpp"

using namespace sievelab;

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209;
}

TEST_CASE("log_gamma matches factorials and the half-integer value") {
  double factorial = 1.0;
  for (int n = 1; n <= 20; ++n) {
    CHECK(sf::log_gamma(n) == doctest::Approx(std::log(factorial)).epsilon(1e-13));
    factorial *= n;
  }
  CHECK(sf::log_gamma(0.5) ==
        doctest::Approx(0.5 * std::log(3.14159265358979323846)).epsilon(1e-13));
  CHECK(sf::log_gamma(1e6) == doctest::Approx(std::lgamma(1e6)).epsilon(1e-12));
}

TEST_CASE("digamma reference values and recurrence") {
  CHECK(sf::digamma(1.0) == doctest::Approx(-kEulerGamma).epsilon(1e-12));
  CHECK(sf::digamma(2.0) == doctest::Approx(1.0 - kEulerGamma).epsilon(1e-12));
  CHECK(sf::digamma(0.5) ==
        doctest::Approx(-kEulerGamma - 2.0 * std::log(2.0)).epsilon(1e-12));
  for (double x : {0.3, 0.9, 1.7, 4.2, 11.5, 123.0}) {
    CHECK(sf::digamma(x + 1.0) - sf::digamma(x) ==
          doctest::Approx(1.0 / x).epsilon(1e-12));
  }
}

TEST_CASE("digamma difference equals the log-moment integral of a Beta density") {
  // E[-log X] for X ~ Beta(alpha, beta) is psi(alpha+beta) - psi(alpha).
  for (auto [alpha, beta] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {1.5, 2.5}, {0.7, 3.0}}) {
    const double log_norm = sf::log_beta(alpha, beta);
    const double direct = integrate_or_throw(
        [&](double x) {
          return -std::log(x) *
                 std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) -
                          log_norm);
        },
        0.0, 1.0, 1e-11);
    CHECK(direct ==
          doctest::Approx(sf::digamma(alpha + beta) - sf::digamma(alpha)).epsilon(1e-8));
  }
}

TEST_CASE("regularized incomplete beta") {
  for (double x : {0.05, 0.3, 0.77, 0.99}) {
    CHECK(sf::reg_inc_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-13));
    CHECK(sf::reg_inc_beta(2.0, 1.0, x) == doctest::Approx(x * x).epsilon(1e-13));
    // Symmetry.
    CHECK(sf::reg_inc_beta(1.5, 2.5, x) ==
          doctest::Approx(1.0 - sf::reg_inc_beta(2.5, 1.5, 1.0 - x)).epsilon(1e-12));
  }
  CHECK(sf::reg_inc_beta(1.5, 2.5, 0.0) == 0.0);
  CHECK(sf::reg_inc_beta(1.5, 2.5, 1.0) == 1.0);

  // Against direct quadrature of the density.
  const double log_norm = sf::log_beta(1.5, 2.5);
  const double direct = integrate_or_throw(
      [&](double t) {
        return std::exp(0.5 * std::log(t) + 1.5 * std::log1p(-t) - log_norm);
      },
      0.0, 0.4, 1e-12);
  CHECK(sf::reg_inc_beta(1.5, 2.5, 0.4) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("upper regularized gamma") {
  for (double x : {0.1, 1.0, 3.7, 20.0}) {
    CHECK(sf::reg_gamma_upper(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    CHECK(sf::reg_gamma_upper(0.5, x) ==
          doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-11));
  }
  CHECK(sf::reg_gamma_upper(3.0, 0.0) == 1.0);
  // Chi-square tail with 4 degrees of freedom at its mean.
  CHECK(sf::reg_gamma_upper(2.0, 2.0) ==
        doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("kolmogorov tail") {
  CHECK(sf::kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(sf::kolmogorov_tail(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(sf::kolmogorov_tail(0.05) == doctest::Approx(1.0).epsilon(1e-6));
  double prev = 1.0;
  for (double lam = 0.3; lam < 3.0; lam += 0.1) {
    const double q = sf::kolmogorov_tail(lam);
    CHECK(q <= prev + 1e-12);
    prev = q;
  }
}

TEST_CASE("compensated summation") {
  NeumaierSum sum;
  sum.add(1e16);
  for (int i = 0; i < 10'000; ++i) sum.add(1.0);
  sum.add(-1e16);
  CHECK(sum.value() == doctest::Approx(10'000.0).epsilon(1e-12));
}
