#include "kgrec/chi2.hpp"

#include <doctest.h>

#include <cmath>

#include "kgrec/error.hpp"

#include "testutil.hpp"

using namespace kgrec;

TEST_CASE("cdf at zero is zero") {
  for (unsigned df : {1u, 2u, 5u, 36u}) CHECK(chi_square_cdf(0.0, df) == 0.0);
}

TEST_CASE("standard critical values land at 0.95") {
  CHECK(chi_square_cdf(3.841, 1) == testutil::approx(0.95).epsilon(0).margin(1e-3));
  CHECK(chi_square_cdf(5.991, 2) == testutil::approx(0.95).epsilon(0).margin(1e-3));
  CHECK(chi_square_cdf(50.998, 36) ==
        testutil::approx(0.95).epsilon(0).margin(1e-3));
}

TEST_CASE("cdf is monotone non-decreasing on a dense grid") {
  for (unsigned df : {1u, 2u, 5u, 36u}) {
    double hi = 10.0 * df;
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
      double x = hi * double(i) / 999.0;
      double v = chi_square_cdf(x, df);
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("cdf approaches one in the far tail") {
  for (unsigned df : {1u, 5u, 36u})
    CHECK(chi_square_cdf(50.0 * df, df) == testutil::approx(1.0).margin(1e-6));
}

TEST_CASE("half-integer shape matches the error function") {
  // P(1/2, x) = erf(sqrt(x)), an independent closed form for df = 1
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    CHECK(regularized_gamma_p(0.5, x) ==
          testutil::approx(std::erf(std::sqrt(x))).margin(1e-10));
    CHECK(chi_square_cdf(x, 1) ==
          testutil::approx(std::erf(std::sqrt(x / 2.0))).margin(1e-10));
  }
}

TEST_CASE("exponential special case for two degrees of freedom") {
  for (double x : {0.25, 1.0, 3.0, 8.0})
    CHECK(chi_square_cdf(x, 2) ==
          testutil::approx(1.0 - std::exp(-x / 2.0)).margin(1e-10));
}

TEST_CASE("quantile inverts the cdf") {
  for (unsigned df : {1u, 2u, 5u, 36u}) {
    for (double p : {0.05, 0.5, 0.95, 0.99}) {
      double q = chi_square_quantile(p, df);
      CHECK(chi_square_cdf(q, df) == testutil::approx(p).margin(1e-6));
    }
  }
  CHECK(chi_square_quantile(0.95, 1) == testutil::approx(3.841).margin(2e-3));
  CHECK(chi_square_quantile(0.95, 36) == testutil::approx(50.998).margin(2e-2));
}

TEST_CASE("domain violations are rejected") {
  CHECK_THROWS_AS(chi_square_cdf(-0.1, 1), DomainError);
  CHECK_THROWS_AS(chi_square_cdf(1.0, 0), DomainError);
  CHECK_THROWS_AS(regularized_gamma_p(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(regularized_gamma_p(1.0, -1.0), DomainError);
}
