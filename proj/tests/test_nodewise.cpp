#include <doctest.h>

#include <cmath>

#include "hdboot/nodewise.hpp"
#include "hdboot/simharness.hpp"
#include "helpers.hpp"

using hdboot::DesignMatrix;
using hdboot::Matrix;
using hdboot::Vector;

namespace {

DesignMatrix toeplitz_fixture(int n, int p) {
  hdboot::ScenarioConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.design_seed = 12;
  return hdboot::gen_design(cfg);
}

}  // namespace

TEST_CASE("orthogonal columns pass through unchanged") {
  Matrix X(4, 3);
  X << 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1;
  // Columns pairwise orthogonal by construction.
  REQUIRE(std::fabs(X.col(0).dot(X.col(1))) < 1e-14);
  DesignMatrix Xd(X);
  for (double lambda_x : {0.0, 0.1, 1.0}) {
    auto proj = hdboot::nodewise_residuals(Xd, lambda_x, hdboot::all_targets(3));
    for (int t = 0; t < 3; ++t) {
      CHECK((proj.Z.col(t) - X.col(t)).lpNorm<Eigen::Infinity>() < 1e-10);
      CHECK(proj.gamma[static_cast<std::size_t>(t)].lpNorm<Eigen::Infinity>() < 1e-10);
    }
  }
}

TEST_CASE("p = 1 leaves the single column untouched") {
  Matrix X(5, 1);
  X << 1, 2, -1, 0.5, 3;
  DesignMatrix Xd(X);
  auto proj = hdboot::nodewise_residuals(Xd, 0.3, {0});
  CHECK((proj.Z.col(0) - X.col(0)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(proj.gamma[0].size() == 0);
}

TEST_CASE("toeplitz fixture matches the per-column convex oracle") {
  auto X = toeplitz_fixture(30, 5);
  const double lambda_x = hdboot::default_lambda_x(30, 5);
  auto proj = hdboot::nodewise_residuals(X, lambda_x, hdboot::all_targets(5));
  for (int j = 0; j < 5; ++j) {
    Matrix Xmj(30, 4);
    Xmj << X.values().leftCols(j), X.values().rightCols(4 - j);
    const Vector gamma_oracle =
        testutil::fista_lasso(Xmj, X.values().col(j), lambda_x);
    const Vector z_oracle = X.values().col(j) - Xmj * gamma_oracle;
    CHECK((proj.Z.col(j) - z_oracle).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((proj.gamma[static_cast<std::size_t>(j)] - gamma_oracle)
              .lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("reconstruction identity holds to float precision") {
  auto X = toeplitz_fixture(40, 8);
  auto proj = hdboot::nodewise_residuals(X, 0.2, hdboot::all_targets(8));
  for (int t = 0; t < 8; ++t) {
    Matrix Xmj(40, 7);
    Xmj << X.values().leftCols(t), X.values().rightCols(7 - t);
    const Vector rebuilt =
        X.values().col(t) - Xmj * proj.gamma[static_cast<std::size_t>(t)];
    CHECK((proj.Z.col(t) - rebuilt).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("inner products Z_j^T X_j stay positive on fixtures") {
  auto X = toeplitz_fixture(50, 10);
  for (double lambda_x : {0.05, 0.2, 0.5}) {
    auto proj = hdboot::nodewise_residuals(X, lambda_x, hdboot::all_targets(10));
    for (int t = 0; t < 10; ++t) {
      CHECK(proj.zx_inner[t] > 0.0);
      CHECK(proj.z_norm2[t] > 0.0);
    }
  }
}

TEST_CASE("results per target do not depend on the requested set") {
  auto X = toeplitz_fixture(30, 6);
  auto all = hdboot::nodewise_residuals(X, 0.25, hdboot::all_targets(6));
  auto just2 = hdboot::nodewise_residuals(X, 0.25, {2});
  CHECK((all.Z.col(2) - just2.Z.col(0)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(all.zx_inner[2] == just2.zx_inner[0]);
}

TEST_CASE("default lambda_x formula and guards") {
  CHECK(hdboot::default_lambda_x(100, 500) ==
        doctest::Approx(std::sqrt(std::log(500.0) / 100.0)).epsilon(1e-12));
  CHECK(hdboot::default_lambda_x(100, 500) == doctest::Approx(0.2493).epsilon(1e-3));
  CHECK(hdboot::default_lambda_x(30, 2000) == doctest::Approx(0.5032).epsilon(1e-3));
  CHECK_THROWS_AS(hdboot::default_lambda_x(1, 10), hdboot::ConfigError);
  CHECK_THROWS_AS(hdboot::default_lambda_x(10, 1), hdboot::ConfigError);
}

TEST_CASE("nodewise guards") {
  auto X = toeplitz_fixture(10, 6);
  CHECK_THROWS_AS(hdboot::nodewise_residuals(X, 0.1, {}), hdboot::ConfigError);
  CHECK_THROWS_AS(hdboot::nodewise_residuals(X, 0.1, {6}), hdboot::ConfigError);
  CHECK_THROWS_AS(hdboot::nodewise_residuals(X, -0.1, {0}), hdboot::ConfigError);

  auto wide = toeplitz_fixture(5, 8);
  CHECK_THROWS_AS(hdboot::nodewise_residuals(wide, 0.0, {0}), hdboot::Unidentifiable);

  // Duplicated column: the projection of either copy degenerates.
  Matrix D(10, 2);
  D.col(0) = X.values().col(0);
  D.col(1) = X.values().col(0);
  CHECK_THROWS_AS(
      hdboot::nodewise_residuals(DesignMatrix(D), 0.0, hdboot::all_targets(2)),
      hdboot::DegenerateProjection);
}
