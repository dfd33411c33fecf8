#include "hdboot/despars.hpp"

#include <cmath>

#include "hdboot/stats.hpp"

namespace hdboot {

DesparsResult desparsify(const DesignMatrix& X, const ResponseVector& y,
                         const LassoFit& fit, const NodewiseProjection& proj,
                         const DesparsOptions& options) {
  check_paired(X, y);
  const int n = X.n();
  const int p = X.p();
  if (fit.beta.size() != p) {
    throw DimensionMismatch("fit and design disagree on p");
  }
  if (proj.Z.rows() != n) {
    throw DimensionMismatch("projection and design disagree on n");
  }
  if (fit.s_hat >= n) {
    throw SaturatedFit("desparsify requires s_hat < n for the variance estimate");
  }
  const auto m = static_cast<Eigen::Index>(proj.targets.size());
  const Vector& resid = fit.residuals;
  const double resid_norm2 = resid.squaredNorm();
  if (resid_norm2 == 0.0) {
    throw DegenerateVariance("zero residuals: standard errors are undefined");
  }
  const double sigma_hat = estimate_sigma(fit, n, SigmaDenominator::DfAdjusted);
  const double omega_df = options.omega_denominator == SigmaDenominator::DfAdjusted
                              ? static_cast<double>(n - fit.s_hat)
                              : static_cast<double>(n);

  DesparsResult res;
  res.targets = proj.targets;
  res.b_hat.resize(m);
  res.se_plain.resize(m);
  res.se_robust.resize(m);
  res.negative_zx.assign(proj.targets.size(), false);

  const Vector Zt_resid = proj.Z.transpose() * resid;
  for (Eigen::Index t = 0; t < m; ++t) {
    const int j = proj.targets[t];
    const double zx = proj.zx_inner[t];
    if (zx < 0.0) {
      res.negative_zx[static_cast<std::size_t>(t)] = true;
      res.warnings.push_back("Z_j^T X_j < 0 for variable " + std::to_string(j) +
                             "; sign factor applied to studentized statistics");
    }
    res.b_hat[t] = fit.beta[j] + Zt_resid[t] / zx;

    const double abs_zx = std::fabs(zx);
    res.se_plain[t] = sigma_hat * std::sqrt(proj.z_norm2[t]) / abs_zx;

    // omega^2 = df^-1 * sum_i (eps_i Z_ji - mean)^2
    const auto zcol = proj.Z.col(t);
    const Vector prod = resid.cwiseProduct(zcol);
    const double mean = prod.mean();
    const double omega2 = (prod.array() - mean).square().sum() / omega_df;
    res.se_robust[t] = std::sqrt(static_cast<double>(n) * omega2) / abs_zx;

    if (res.se_plain[t] <= 0.0 || res.se_robust[t] <= 0.0) {
      throw DegenerateVariance("zero standard error for variable " +
                               std::to_string(j));
    }
  }

  if (options.cross_check &&
      static_cast<double>(m) * p * n < 2e8) {
    // Equivalent form b_j = Z_j^T y / zx - sum_{k != j} (Z_j^T X_k / zx) beta_k.
    const Vector Zty = proj.Z.transpose() * y.values();
    const Matrix ZtX = proj.Z.transpose() * X.values();
    const double scale = 1.0 + fit.beta.cwiseAbs().maxCoeff() +
                         res.b_hat.cwiseAbs().maxCoeff();
    for (Eigen::Index t = 0; t < m; ++t) {
      const int j = proj.targets[t];
      const double zx = proj.zx_inner[t];
      double alt = Zty[t];
      for (int k = 0; k < p; ++k) {
        if (k != j) alt -= ZtX(t, k) * fit.beta[k];
      }
      alt /= zx;
      if (std::fabs(alt - res.b_hat[t]) > 1e-8 * scale) {
        throw Error(ErrorKind::Numerical, "despars_cross_check",
                    "de-sparsified estimate cross-check failed for variable " +
                        std::to_string(j));
      }
    }
  }
  return res;
}

Vector studentize(const DesparsResult& res, const Vector& null_values,
                  Studentization mode) {
  const auto m = res.b_hat.size();
  if (null_values.size() != m) {
    throw DimensionMismatch("null_values length does not match targets");
  }
  const Vector& se = res.se(mode);
  Vector t(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(se[i] > 0.0)) {
      throw DegenerateVariance("studentize: nonpositive standard error");
    }
    t[i] = (res.b_hat[i] - null_values[i]) / se[i];
    if (res.negative_zx[static_cast<std::size_t>(i)]) t[i] = -t[i];
  }
  return t;
}

NormalInference normal_approx_inference(const DesparsResult& res, double alpha,
                                        Studentization mode) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  const Vector& se = res.se(mode);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  NormalInference out;
  const auto m = res.b_hat.size();
  out.lower.resize(m);
  out.upper.resize(m);
  out.p_values.resize(m);
  out.t_stats = studentize(res, Vector::Zero(m), mode);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.lower[i] = res.b_hat[i] - z * se[i];
    out.upper[i] = res.b_hat[i] + z * se[i];
    out.p_values[i] = 2.0 * normal_sf(std::fabs(out.t_stats[i]));
  }
  return out;
}

}  // namespace hdboot
