#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hdboot/data.hpp"

namespace hdboot {

/// Denominator of the residual-variance estimate.
enum class SigmaDenominator {
  DfAdjusted,  // n - s_hat (default)
  PlainN,      // n
};

struct SolverOptions {
  int max_iter = 100000;          // coordinate-descent passes
  double coord_tol = 1e-8;        // max coordinate change per pass
  double gap_tol = 1e-7;          // duality gap relative to 1 + objective
  double kkt_tol = 1e-6;          // tolerance used by KKT checks
  SigmaDenominator sigma_denominator = SigmaDenominator::DfAdjusted;
  bool track_objective = false;   // record objective after every pass
};

/// Solution of min_beta ||y - X beta||^2 / n + lambda * ||beta||_1.
///
/// Note the objective carries no 1/2: a lambda for the common
/// 1/(2n) ||.||^2 + lambda ||.||_1 convention corresponds to lambda/2 here.
struct LassoFit {
  Vector beta;
  double lambda = 0.0;
  Vector residuals;
  IndexSet active_set;
  int s_hat = 0;
  // NaN when s_hat >= n (saturated); estimate_sigma() then throws.
  double sigma_hat = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  std::vector<double> objective_path;  // filled when track_objective

  double objective(const Matrix& X, const Vector& y) const;
};

/// Smallest lambda with all-zero solution: 2 ||X^T y||_inf / n.
double lambda_max(const DesignMatrix& X, const ResponseVector& y);

/// Shared per-design precomputation: gram = X^T X / n.
struct LassoWorkspace {
  Matrix gram;
  explicit LassoWorkspace(const Matrix& X) {
    gram.noalias() = X.transpose() * X / static_cast<double>(X.rows());
  }
};

LassoFit fit_lasso(const DesignMatrix& X, const ResponseVector& y, double lambda,
                   const SolverOptions& options = {},
                   const LassoWorkspace* workspace = nullptr,
                   const Vector* warm_start = nullptr);

/// Log-spaced grid of `points` values from lambda_max down to
/// ratio * lambda_max (strictly decreasing).
std::vector<double> default_lambda_grid(const DesignMatrix& X,
                                        const ResponseVector& y,
                                        int points = 50, double ratio = 0.01);

/// K-fold CV over a strictly decreasing grid; ties break toward larger
/// lambda. Fold split rule: Fisher-Yates shuffle of 0..n-1 driven by
/// CounterRng(seed, 0), then contiguous blocks (fold k gets positions
/// [k*n/K, (k+1)*n/K) of the shuffled order).
double select_lambda_cv(const DesignMatrix& X, const ResponseVector& y, int folds,
                        const std::vector<double>& grid, std::uint64_t seed,
                        const SolverOptions& options = {});

/// sqrt(||residuals||^2 / (n - s_hat)); throws SaturatedFit when s_hat >= n.
double estimate_sigma(const LassoFit& fit, int n,
                      SigmaDenominator denom = SigmaDenominator::DfAdjusted);

}  // namespace hdboot
