#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "ionstate/errors.hpp"
#include "ionstate/special.hpp"

using namespace ionstate;

TEST_SUITE("special") {
  TEST_CASE("P(1, x) is 1 - exp(-x)") {
    CHECK(reg_lower_gamma(1, 1.0) == doctest::Approx(0.632121).epsilon(1e-6));
    CHECK(reg_lower_gamma(1, 1.0) == doctest::Approx(oracle::reg_lower_gamma(1, 1.0)).epsilon(1e-13));
    for (double x : {1e-8, 0.3, 2.0, 17.0}) CHECK(reg_lower_gamma(1, x) == doctest::Approx(-std::expm1(-x)).epsilon(1e-13));
  }

  TEST_CASE("limits and domain") {
    for (int k : {1, 2, 10, 80}) {
      CHECK(reg_lower_gamma(k, 0.0) == 0.0);
      CHECK(reg_lower_gamma(k, 1e4) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(reg_upper_gamma(k, 0.0) == 1.0);
    }
    CHECK_THROWS_AS(reg_lower_gamma(3, -0.1), DomainError);
    CHECK_THROWS_AS(reg_lower_gamma(0, 1.0), DomainError);
  }

  TEST_CASE("agrees with quadrature of the defining integral") {
    double worst = 0.0;
    for (int k : {1, 2, 3, 5, 9, 15, 30, 60, 100}) {
      for (double x : {0.01, 0.5, 1.0, 3.0, 7.5, 12.0, 25.0, 60.0, 110.0, 180.0}) {
        worst = std::max(worst, std::abs(reg_lower_gamma(k, x) - oracle::reg_lower_gamma(k, x)));
      }
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("recurrence in k") {
    double worst = 0.0;
    for (int k = 1; k <= 100; ++k) {
      for (double x = 0.0; x <= 200.0; x += 0.73) {
        const double term = x == 0.0 ? 0.0 : std::exp(k * std::log(x) - x - std::lgamma(k + 1.0));
        worst = std::max(worst, std::abs(reg_lower_gamma(k + 1, x) - (reg_lower_gamma(k, x) - term)));
      }
    }
    CHECK(worst < 1e-11);
  }

  TEST_CASE("monotone in x, complement and interval") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const int k = 1 + static_cast<int>(60 * u(rng));
      const double a = 100 * u(rng), b = a + 20 * u(rng);
      CHECK(reg_lower_gamma(k, b) >= reg_lower_gamma(k, a));
      CHECK(reg_lower_gamma(k, a) + reg_upper_gamma(k, a) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(reg_gamma_interval(k, a, b) - (reg_lower_gamma(k, b) - reg_lower_gamma(k, a))) < 1e-14);
    }
    // Far tail: the interval keeps relative accuracy where the difference of P cancels.
    const double tail = reg_gamma_interval(2, 60.0, 61.0);
    CHECK(tail == doctest::Approx(61.0 * std::exp(-60.0) - 62.0 * std::exp(-61.0)).epsilon(1e-10));
  }

  TEST_CASE("Poisson mass") {
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    for (double mu : {0.44, 8.7, 150.0}) {
      double sum = 0.0;
      for (int n = 0; n < 600; ++n) {
        sum += poisson_pmf(mu, n);
        if (n < 100) CHECK(poisson_pmf(mu, n) == doctest::Approx(oracle::poisson(mu, n)).epsilon(1e-12).scale(1e-300));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}
