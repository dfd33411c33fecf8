#include <doctest.h>

#include <cmath>
#include <vector>

#include "hdboot/stats.hpp"
#include "helpers.hpp"

TEST_CASE("normal cdf against frozen oracle values") {
  // Reference values computed with an independent implementation.
  CHECK(hdboot::normal_cdf(-3.0) == doctest::Approx(0.0013498980316300933).epsilon(1e-12));
  CHECK(hdboot::normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(hdboot::normal_cdf(0.3) == doctest::Approx(0.61791142218895256).epsilon(1e-12));
  CHECK(hdboot::normal_cdf(1.959964) == doctest::Approx(0.97500000090355765).epsilon(1e-12));
  CHECK(hdboot::normal_cdf(4.5) == doctest::Approx(0.99999660232687526).epsilon(1e-12));
  CHECK(hdboot::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normal survival function stays accurate in the tail") {
  CHECK(hdboot::normal_sf(4.5) == doctest::Approx(1.0 - 0.99999660232687526).epsilon(1e-9));
  CHECK(hdboot::normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hdboot::normal_sf(10.0) > 0.0);
  CHECK(hdboot::normal_sf(40.0) == 0.0);  // underflow, not garbage
}

TEST_CASE("normal quantile against frozen oracle values") {
  CHECK(hdboot::normal_quantile(1e-10) == doctest::Approx(-6.3613409024040557).epsilon(1e-12));
  CHECK(hdboot::normal_quantile(0.025) == doctest::Approx(-1.9599639845400545).epsilon(1e-12));
  CHECK(hdboot::normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(hdboot::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(hdboot::normal_quantile(0.999999999999) == doctest::Approx(7.0344869100478356).epsilon(1e-10));
}

TEST_CASE("quantile and cdf invert each other") {
  for (double p : {0.001, 0.1, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(hdboot::normal_cdf(hdboot::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("type-7 quantile matches the order-statistic oracle") {
  const std::vector<double> values{3.0, -1.0, 7.5, 2.0, 0.0, 9.25, -4.0};
  for (double nu : {0.0, 0.05, 0.25, 0.5, 0.9, 0.95, 1.0}) {
    CHECK(hdboot::quantile(values, nu) ==
          doctest::Approx(testutil::quantile_oracle(values, nu)).epsilon(1e-15));
  }
  CHECK(hdboot::quantile({5.0}, 0.3) == 5.0);
  CHECK(hdboot::quantile(values, 0.0) == -4.0);
  CHECK(hdboot::quantile(values, 1.0) == 9.25);
}
