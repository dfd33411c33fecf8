#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hdboot/errors.hpp"
#include "hdboot/multiple_testing.hpp"
#include "hdboot/stats.hpp"

TEST_CASE("holm: single value and the textbook pair") {
  CHECK(hdboot::holm_adjust({0.03}) == std::vector<double>{0.03});
  const auto pair = hdboot::holm_adjust({0.01, 0.04});
  CHECK(pair[0] == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(pair[1] == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("holm matches an independent sort-based oracle on a frozen vector") {
  const std::vector<double> p{0.002, 0.9, 0.04, 0.001, 0.3,
                              0.011, 0.08, 0.5,  0.012, 0.04};
  const auto adjusted = hdboot::holm_adjust(p);

  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> oracle(m);
  double running = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    running = std::max(running, static_cast<double>(m - r) * p[order[r]]);
    oracle[order[r]] = std::min(1.0, running);
  }
  for (std::size_t j = 0; j < m; ++j) {
    CHECK(adjusted[j] == doctest::Approx(oracle[j]).epsilon(1e-15));
    CHECK(adjusted[j] >= p[j]);
  }

  CHECK_THROWS_AS(hdboot::holm_adjust({0.5, -0.1}), hdboot::ConfigError);
  CHECK_THROWS_AS(hdboot::holm_adjust({1.5}), hdboot::ConfigError);
}

TEST_CASE("equivalent tests: closed-form points") {
  CHECK(hdboot::equivalent_tests(0.0, 0.05) == doctest::Approx(0.05).epsilon(1e-15));
  // Frozen value from an independent normal-CDF implementation.
  CHECK(hdboot::equivalent_tests(3.0, 0.05) ==
        doctest::Approx(18.51991736724796).epsilon(1e-12));
}

TEST_CASE("equivalent tests inverts the rejection threshold") {
  for (auto [alpha, p] : {std::pair{0.05, 500.0}, std::pair{0.01, 4026.0}}) {
    const double t_rej = hdboot::normal_quantile(1.0 - alpha / (2.0 * p));
    const double p_equiv = hdboot::equivalent_tests(t_rej, alpha);
    CHECK(std::fabs(p_equiv - p) / p < 1e-9);
  }
}

TEST_CASE("equivalent tests guards and overflow sentinel") {
  CHECK_THROWS_AS(hdboot::equivalent_tests(-1.0, 0.05), hdboot::ConfigError);
  CHECK_THROWS_AS(hdboot::equivalent_tests(1.0, 0.0), hdboot::ConfigError);
  CHECK_THROWS_AS(hdboot::equivalent_tests(1.0, 1.0), hdboot::ConfigError);
  CHECK(hdboot::equivalent_tests(60.0, 0.05) ==
        std::numeric_limits<double>::infinity());
}
