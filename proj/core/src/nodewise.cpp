#include "hdboot/nodewise.hpp"

#include <cmath>
#include <numeric>
#include <optional>

#include "hdboot/detail/cd.hpp"

namespace hdboot {

IndexSet all_targets(int p) {
  IndexSet t(p);
  std::iota(t.begin(), t.end(), 0);
  return t;
}

double default_lambda_x(int n, int p) {
  if (n < 2 || p < 2) throw ConfigError("default_lambda_x needs n >= 2, p >= 2");
  const double value = std::sqrt(std::log(static_cast<double>(p)) / n);
  if (!std::isfinite(value)) {
    throw ConfigError("default_lambda_x overflowed for the given n, p");
  }
  return value;
}

NodewiseProjection nodewise_residuals(const DesignMatrix& X, double lambda_x,
                                      const IndexSet& targets,
                                      const SolverOptions& options,
                                      const LassoWorkspace* workspace) {
  if (targets.empty()) throw ConfigError("nodewise targets must be nonempty");
  const int n = X.n();
  const int p = X.p();
  if (lambda_x < 0.0) throw ConfigError("lambda_x must be nonnegative");
  if (lambda_x == 0.0 && p - 1 >= n && p > 1) {
    throw Unidentifiable("lambda_x = 0 with p - 1 >= n is not identifiable");
  }
  for (int j : targets) {
    if (j < 0 || j >= p) {
      throw ConfigError("nodewise target " + std::to_string(j) + " out of range");
    }
  }

  NodewiseProjection proj;
  proj.lambda_x = lambda_x;
  proj.targets = targets;
  proj.Z.resize(n, static_cast<Eigen::Index>(targets.size()));
  proj.gamma.resize(targets.size());
  proj.zx_inner.resize(static_cast<Eigen::Index>(targets.size()));
  proj.z_norm2.resize(static_cast<Eigen::Index>(targets.size()));

  std::optional<LassoWorkspace> local;
  if (!workspace && p > 1) local.emplace(X.values());
  const Matrix* G = workspace ? &workspace->gram : (local ? &local->gram : nullptr);

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const int j = targets[t];
    Vector gamma_full = Vector::Zero(p);
    if (p > 1) {
      if (lambda_x == 0.0) {
        // Unpenalized: least squares of X_j on X_{-j}.
        Matrix Xmj(n, p - 1);
        Xmj << X.values().leftCols(j), X.values().rightCols(p - 1 - j);
        Eigen::ColPivHouseholderQR<Matrix> qr(Xmj);
        Vector g = qr.solve(X.values().col(j));
        for (int k = 0; k < p - 1; ++k) gamma_full[k < j ? k : k + 1] = g[k];
      } else {
        detail::CdResult cd = detail::cd_gram(*G, G->col(j), (*G)(j, j), lambda_x,
                                              options, nullptr, j);
        gamma_full = std::move(cd.beta);
      }
    }
    Vector z = X.values().col(j) - X.values() * gamma_full;
    proj.Z.col(static_cast<Eigen::Index>(t)) = z;
    Vector packed(p > 1 ? p - 1 : 0);
    for (int k = 0, i = 0; k < p; ++k) {
      if (k != j) packed[i++] = gamma_full[k];
    }
    proj.gamma[t] = std::move(packed);
    const double zx = z.dot(X.values().col(j));
    const double zn = z.squaredNorm();
    proj.zx_inner[static_cast<Eigen::Index>(t)] = zx;
    proj.z_norm2[static_cast<Eigen::Index>(t)] = zn;
    if (std::fabs(zx) <= 1e-12 * static_cast<double>(n)) {
      throw DegenerateProjection(
          "Z_j^T X_j vanishes for variable " + std::to_string(j) +
          ": column fully explained by the others at this lambda_x");
    }
  }
  return proj;
}

}  // namespace hdboot
