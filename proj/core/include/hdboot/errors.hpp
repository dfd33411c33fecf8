#pragma once

#include <stdexcept>
#include <string>

namespace hdboot {

/// Error category, used by the CLI to map failures to exit codes.
enum class ErrorKind {
  Usage,      // bad arguments / configuration
  Data,       // unreadable or inconsistent input data
  Numerical,  // solver or inference failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Stable machine-readable code, e.g. "dimension_mismatch".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorKind::Data, "dimension_mismatch", what) {}
};

struct Unidentifiable : Error {
  explicit Unidentifiable(const std::string& what)
      : Error(ErrorKind::Numerical, "unidentifiable", what) {}
};

struct NonConvergence : Error {
  NonConvergence(const std::string& what, double gap)
      : Error(ErrorKind::Numerical, "non_convergence", what), final_gap(gap) {}
  double final_gap;
};

struct DegenerateFold : Error {
  explicit DegenerateFold(const std::string& what)
      : Error(ErrorKind::Usage, "degenerate_fold", what) {}
};

struct SaturatedFit : Error {
  explicit SaturatedFit(const std::string& what)
      : Error(ErrorKind::Numerical, "saturated_fit", what) {}
};

struct DegenerateProjection : Error {
  explicit DegenerateProjection(const std::string& what)
      : Error(ErrorKind::Numerical, "degenerate_projection", what) {}
};

struct DegenerateVariance : Error {
  explicit DegenerateVariance(const std::string& what)
      : Error(ErrorKind::Numerical, "degenerate_variance", what) {}
};

struct ReplicateFailure : Error {
  explicit ReplicateFailure(const std::string& what)
      : Error(ErrorKind::Numerical, "replicate_failure", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what)
      : Error(ErrorKind::Data, "parse_error", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::Usage, "config_error", what) {}
};

}  // namespace hdboot
