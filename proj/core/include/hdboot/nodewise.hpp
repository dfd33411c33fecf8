#pragma once

#include "hdboot/data.hpp"
#include "hdboot/lasso.hpp"

namespace hdboot {

/// Regularized residuals Z_j of X_j regressed on X_{-j}, one shared
/// tuning value lambda_x for every target.
struct NodewiseProjection {
  double lambda_x = 0.0;
  IndexSet targets;            // variable indices, column order of Z
  Matrix Z;                    // n x |targets|
  std::vector<Vector> gamma;   // per target, length p - 1 (target column removed)
  Vector zx_inner;             // Z_j^T X_j per target
  Vector z_norm2;              // ||Z_j||^2 per target
};

/// Default tuning sqrt(log(p) / n).
double default_lambda_x(int n, int p);

NodewiseProjection nodewise_residuals(const DesignMatrix& X, double lambda_x,
                                      const IndexSet& targets,
                                      const SolverOptions& options = {},
                                      const LassoWorkspace* workspace = nullptr);

/// All of {0..p-1} as targets.
IndexSet all_targets(int p);

}  // namespace hdboot
