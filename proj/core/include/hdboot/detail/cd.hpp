#pragma once

#include "hdboot/data.hpp"
#include "hdboot/lasso.hpp"

namespace hdboot::detail {

struct CdResult {
  Vector beta;
  double gap = 0.0;
  int iterations = 0;
  std::vector<double> objective_path;
};

// Minimizes c - 2 q^T beta + beta^T G beta + lambda ||beta||_1 over beta,
// with coordinate `exclude` pinned to zero when >= 0. With G = X^T X / n,
// q = X^T y / n and c = ||y||^2 / n this is the penalized least-squares
// objective ||y - X beta||^2 / n + lambda ||beta||_1; with q = G.col(j),
// c = G(j, j), exclude = j it is the nodewise regression of X_j on the rest.
CdResult cd_gram(const Matrix& G, const Vector& q, double c, double lambda,
                 const SolverOptions& opt, const Vector* warm, int exclude);

}  // namespace hdboot::detail
