#pragma once

#include <string>
#include <vector>

#include "hdboot/data.hpp"
#include "hdboot/lasso.hpp"
#include "hdboot/nodewise.hpp"

namespace hdboot {

enum class Studentization { Plain, Robust };

struct DesparsOptions {
  SigmaDenominator omega_denominator = SigmaDenominator::DfAdjusted;
  // Verify the two algebraically equivalent forms of b_hat against each
  // other (skipped automatically for very large problems).
  bool cross_check = true;
};

/// De-sparsified point estimates and standard errors over proj.targets.
struct DesparsResult {
  IndexSet targets;
  Vector b_hat;
  Vector se_plain;
  Vector se_robust;
  std::vector<bool> negative_zx;  // sign flag per target, normally all false
  std::vector<std::string> warnings;

  const Vector& se(Studentization mode) const {
    return mode == Studentization::Plain ? se_plain : se_robust;
  }
};

DesparsResult desparsify(const DesignMatrix& X, const ResponseVector& y,
                         const LassoFit& fit, const NodewiseProjection& proj,
                         const DesparsOptions& options = {});

/// T_j = sgn(Z_j^T X_j) * (b_hat_j - null_j) / se_j.
Vector studentize(const DesparsResult& res, const Vector& null_values,
                  Studentization mode);

struct NormalInference {
  Vector lower;
  Vector upper;
  Vector p_values;  // two-sided, against null 0
  Vector t_stats;
};

/// Gaussian-limit CIs and p-values (the non-bootstrap baseline).
NormalInference normal_approx_inference(const DesparsResult& res, double alpha,
                                        Studentization mode = Studentization::Robust);

}  // namespace hdboot
