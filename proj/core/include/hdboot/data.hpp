#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hdboot/errors.hpp"

namespace hdboot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexSet = std::vector<int>;

/// Fixed n x p design. Validated on construction: n >= 2, p >= 1, all
/// entries finite, no identically zero column.
class DesignMatrix {
 public:
  explicit DesignMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2 || values_.cols() < 1) {
      throw DimensionMismatch("design matrix needs n >= 2 rows and p >= 1 columns");
    }
    if (!values_.allFinite()) {
      throw ParseError("design matrix contains non-finite entries");
    }
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (values_.col(j).cwiseAbs().maxCoeff() == 0.0) {
        throw Unidentifiable("design column " + std::to_string(j) +
                             " is identically zero");
      }
    }
  }

  const Matrix& values() const noexcept { return values_; }
  int n() const noexcept { return static_cast<int>(values_.rows()); }
  int p() const noexcept { return static_cast<int>(values_.cols()); }

 private:
  Matrix values_;
};

class ResponseVector {
 public:
  explicit ResponseVector(Vector values) : values_(std::move(values)) {
    if (!values_.allFinite()) {
      throw ParseError("response vector contains non-finite entries");
    }
  }

  const Vector& values() const noexcept { return values_; }
  int n() const noexcept { return static_cast<int>(values_.size()); }

 private:
  Vector values_;
};

inline void check_paired(const DesignMatrix& X, const ResponseVector& y) {
  if (X.n() != y.n()) {
    throw DimensionMismatch("design has " + std::to_string(X.n()) +
                            " rows but response has " + std::to_string(y.n()));
  }
}

}  // namespace hdboot
