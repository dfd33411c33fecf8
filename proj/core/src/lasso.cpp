#include "hdboot/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdboot/detail/cd.hpp"
#include "hdboot/rng.hpp"

namespace hdboot {

namespace detail {

namespace {
double soft_threshold(double x, double threshold) {
  if (x > threshold) return x - threshold;
  if (x < -threshold) return x + threshold;
  return 0.0;
}
}  // namespace

CdResult cd_gram(const Matrix& G, const Vector& q, double c, double lambda,
                 const SolverOptions& opt, const Vector* warm, int exclude) {
  const int p = static_cast<int>(G.cols());
  Vector beta = warm ? *warm : Vector::Zero(p);
  if (exclude >= 0) beta[exclude] = 0.0;
  Vector g = G * beta;  // maintained gradient term G beta

  const auto objective = [&](double quad) {
    return c - 2.0 * q.dot(beta) + quad + lambda * beta.lpNorm<1>();
  };
  const auto duality_gap = [&]() {
    g.noalias() = G * beta;  // refresh against accumulated drift
    const double quad = beta.dot(g);
    const double primal = objective(quad);
    double r2n = c - 2.0 * q.dot(beta) + quad;  // ||r||^2 / n
    if (r2n < 0.0) r2n = 0.0;
    Vector corr = q - g;  // X^T r / n
    if (exclude >= 0) corr[exclude] = 0.0;
    const double inf_norm = 2.0 * corr.lpNorm<Eigen::Infinity>();
    const double s = (inf_norm > lambda && inf_norm > 0.0) ? lambda / inf_norm : 1.0;
    const double dual = 2.0 * s * (r2n + corr.dot(beta)) - s * s * r2n;
    return std::pair{primal - dual, primal};
  };

  CdResult out;
  double gap = std::numeric_limits<double>::infinity();
  double primal = 0.0;
  for (int pass = 1; pass <= opt.max_iter; ++pass) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      if (j == exclude) continue;
      const double gjj = G(j, j);
      if (gjj <= 0.0) continue;  // zero column in the subproblem
      const double old = beta[j];
      const double cj = q[j] - (g[j] - gjj * old);
      const double updated = soft_threshold(cj, lambda / 2.0) / gjj;
      if (updated != old) {
        g.noalias() += G.col(j) * (updated - old);
        beta[j] = updated;
        max_change = std::max(max_change, std::fabs(updated - old));
      }
    }
    out.iterations = pass;
    if (opt.track_objective) {
      out.objective_path.push_back(objective(beta.dot(G * beta)));
    }
    if (max_change < opt.coord_tol || pass % 50 == 0 || pass == opt.max_iter) {
      std::tie(gap, primal) = duality_gap();
      if (max_change < opt.coord_tol && gap <= opt.gap_tol * (1.0 + primal)) {
        out.beta = std::move(beta);
        out.gap = gap;
        return out;
      }
    }
  }
  throw NonConvergence("lasso coordinate descent did not converge after " +
                           std::to_string(opt.max_iter) + " passes",
                       gap);
}

}  // namespace detail

namespace {

Vector ols_solve(const Matrix& X, const Vector& y) {
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  if (qr.rank() < X.cols()) {
    throw Unidentifiable("lambda = 0 requires full column rank (rank " +
                         std::to_string(qr.rank()) + " < p = " +
                         std::to_string(X.cols()) + ")");
  }
  return qr.solve(y);
}

}  // namespace

double LassoFit::objective(const Matrix& X, const Vector& y) const {
  return (y - X * beta).squaredNorm() / static_cast<double>(X.rows()) +
         lambda * beta.lpNorm<1>();
}

double lambda_max(const DesignMatrix& X, const ResponseVector& y) {
  check_paired(X, y);
  return 2.0 * (X.values().transpose() * y.values()).lpNorm<Eigen::Infinity>() /
         static_cast<double>(X.n());
}

double estimate_sigma(const LassoFit& fit, int n, SigmaDenominator denom) {
  if (denom == SigmaDenominator::DfAdjusted && fit.s_hat >= n) {
    throw SaturatedFit("sigma estimate undefined: s_hat = " +
                       std::to_string(fit.s_hat) + " >= n = " + std::to_string(n));
  }
  const double df = (denom == SigmaDenominator::DfAdjusted)
                        ? static_cast<double>(n - fit.s_hat)
                        : static_cast<double>(n);
  return std::sqrt(fit.residuals.squaredNorm() / df);
}

LassoFit fit_lasso(const DesignMatrix& X, const ResponseVector& y, double lambda,
                   const SolverOptions& options, const LassoWorkspace* workspace,
                   const Vector* warm_start) {
  check_paired(X, y);
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  const int n = X.n();
  const int p = X.p();

  LassoFit fit;
  fit.lambda = lambda;
  if (lambda == 0.0) {
    if (p >= n) {
      throw Unidentifiable("lambda = 0 with p >= n is not identifiable");
    }
    fit.beta = ols_solve(X.values(), y.values());
    fit.duality_gap = 0.0;
    fit.iterations = 0;
  } else {
    std::optional<LassoWorkspace> local;
    if (!workspace) local.emplace(X.values());
    const Matrix& G = workspace ? workspace->gram : local->gram;
    const Vector q = X.values().transpose() * y.values() / static_cast<double>(n);
    const double c = y.values().squaredNorm() / static_cast<double>(n);
    detail::CdResult cd = detail::cd_gram(G, q, c, lambda, options, warm_start, -1);
    fit.beta = std::move(cd.beta);
    fit.duality_gap = cd.gap;
    fit.iterations = cd.iterations;
    fit.objective_path = std::move(cd.objective_path);
  }

  fit.residuals = y.values() - X.values() * fit.beta;
  for (int j = 0; j < p; ++j) {
    if (fit.beta[j] != 0.0) fit.active_set.push_back(j);
  }
  fit.s_hat = static_cast<int>(fit.active_set.size());
  fit.sigma_hat = (options.sigma_denominator == SigmaDenominator::DfAdjusted &&
                   fit.s_hat >= n)
                      ? std::numeric_limits<double>::quiet_NaN()
                      : estimate_sigma(fit, n, options.sigma_denominator);
  return fit;
}

std::vector<double> default_lambda_grid(const DesignMatrix& X,
                                        const ResponseVector& y, int points,
                                        double ratio) {
  if (points < 1) throw ConfigError("lambda grid needs at least one point");
  const double lmax = lambda_max(X, y);
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double log_max = std::log(lmax);
  const double log_min = std::log(lmax * ratio);
  for (int i = 0; i < points; ++i) {
    grid[i] = std::exp(log_max + (log_min - log_max) * i / (points - 1));
  }
  return grid;
}

double select_lambda_cv(const DesignMatrix& X, const ResponseVector& y, int folds,
                        const std::vector<double>& grid, std::uint64_t seed,
                        const SolverOptions& options) {
  check_paired(X, y);
  const int n = X.n();
  if (folds < 2 || folds > n) {
    throw ConfigError("folds must lie in [2, n]");
  }
  if (grid.empty()) throw ConfigError("lambda grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] >= grid[i - 1]) {
      throw ConfigError("lambda grid must be strictly decreasing");
    }
  }

  // Documented split rule: seeded Fisher-Yates shuffle, contiguous blocks.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed, 0);
  for (int i = n - 1; i >= 1; --i) {
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<double> total_sq_err(grid.size(), 0.0);
  for (int k = 0; k < folds; ++k) {
    const int lo = static_cast<int>(static_cast<long long>(k) * n / folds);
    const int hi = static_cast<int>(static_cast<long long>(k + 1) * n / folds);
    const int held = hi - lo;
    if (held < 2) {
      throw DegenerateFold("fold " + std::to_string(k) + " has " +
                           std::to_string(held) + " observations");
    }
    const int train = n - held;
    Matrix Xtr(train, X.p()), Xte(held, X.p());
    Vector ytr(train), yte(held);
    int ti = 0;
    for (int i = 0; i < n; ++i) {
      const int row = order[i];
      if (i >= lo && i < hi) {
        Xte.row(i - lo) = X.values().row(row);
        yte[i - lo] = y.values()[row];
      } else {
        Xtr.row(ti) = X.values().row(row);
        ytr[ti] = y.values()[row];
        ++ti;
      }
    }
    DesignMatrix Xtrain(std::move(Xtr));
    ResponseVector ytrain(std::move(ytr));
    LassoWorkspace ws(Xtrain.values());
    Vector warm = Vector::Zero(X.p());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      LassoFit fit = fit_lasso(Xtrain, ytrain, grid[g], options, &ws, &warm);
      warm = fit.beta;
      total_sq_err[g] += (yte - Xte * fit.beta).squaredNorm();
    }
  }

  std::size_t best = 0;  // grid is decreasing: first strict minimum = largest lambda
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (total_sq_err[g] < total_sq_err[best]) best = g;
  }
  return grid[best];
}

}  // namespace hdboot
