#pragma once

// Shared fixtures and independent oracles for the test suites. The
// oracles deliberately avoid the library's solver internals: the lasso
// oracle is an accelerated proximal-gradient method with its own duality
// certificate, and the quantile oracle works straight from the
// order-statistic definition.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hdboot/data.hpp"

namespace testutil {

using hdboot::Matrix;
using hdboot::Vector;

// Frozen n=6, p=3 instance (drawn once, committed as literals).
inline Matrix fixture_x6() {
  Matrix X(6, 3);
  X << 0.30471707975443135, -1.0399841062404955, 0.75045119580645725,
      0.94056471639121386, -1.9510351886538364, -1.3021795068623181,
      0.12784040316728537, -0.31624259234358221, -0.016801157504288795,
      -0.85304392757358005, 0.87939797486282856, 0.77779193542894831,
      0.066030697561216045, 1.1272412069680329, 0.4675093422520456,
      -0.85929246288323824, 0.36875078408249884, -0.9588826008289989;
  return X;
}

inline Vector fixture_y6() {
  Vector y(6);
  y << 0.87845030130727253, -0.049925910986252896, -0.18486236354526056,
      -0.68092954440394138, 1.2225413386740303, -0.15452948206880215;
  return y;
}

inline double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// FISTA on min ||y - X b||^2 / n + lambda ||b||_1, run until its own
// duality certificate drops below `gap_tol` relative to 1 + objective.
inline Vector fista_lasso(const Matrix& X, const Vector& y, double lambda,
                          double gap_tol = 1e-10, int max_iter = 500000) {
  const double n = static_cast<double>(X.rows());
  const Matrix G = X.transpose() * X / n;
  const Vector q = X.transpose() * y / n;
  const double lips = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(G)
                                .eigenvalues()
                                .maxCoeff();
  const double step = 1.0 / std::max(lips, 1e-12);

  Vector b = Vector::Zero(X.cols());
  Vector v = b;
  double t = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector grad = 2.0 * (G * v - q);
    Vector b_next(b.size());
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      b_next[j] = soft(v[j] - step * grad[j], step * lambda);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    v = b_next + ((t - 1.0) / t_next) * (b_next - b);
    b = b_next;
    t = t_next;

    if (it % 10 == 0 || it == max_iter - 1) {
      const Vector r = y - X * b;
      const double primal = r.squaredNorm() / n + lambda * b.lpNorm<1>();
      const double xtr_inf = (X.transpose() * r).lpNorm<Eigen::Infinity>();
      const double s =
          (2.0 * xtr_inf / n > lambda) ? lambda * n / (2.0 * xtr_inf) : 1.0;
      const Vector u = (2.0 * s / n) * r;
      const double dual = u.dot(y) - (n / 4.0) * u.squaredNorm();
      if (primal - dual <= gap_tol * (1.0 + primal)) return b;
    }
  }
  return b;
}

// Type-7 quantile straight from the definition: 1-based h = (m-1)nu + 1.
inline double quantile_oracle(std::vector<double> values, double nu) {
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  const double h = (m - 1.0) * nu + 1.0;
  const double lo = std::floor(h);
  const std::size_t i = static_cast<std::size_t>(lo) - 1;
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (h - lo) * (values[i + 1] - values[i]);
}

}  // namespace testutil
