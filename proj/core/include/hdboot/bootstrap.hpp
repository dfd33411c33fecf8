#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdboot/despars.hpp"
#include "hdboot/rng.hpp"

namespace hdboot {

enum class Scheme { Residual, Wild, XYZPaired, ZCLinear };
enum class Multiplier { Gaussian, Rademacher, MammenTwoPoint };
enum class Center {
  AtEstimate,    // Y* = X beta_hat + eps*, pivots centered at beta_hat
  CompleteNull,  // Y* = eps*, pivots centered at 0
};

struct BootstrapSpec {
  Scheme scheme = Scheme::Wild;
  Multiplier multiplier = Multiplier::Gaussian;  // Wild / ZCLinear only
  int B = 1000;
  Studentization studentization = Studentization::Robust;
  Center center = Center::AtEstimate;
  std::uint64_t seed = 0;
};

/// B x |targets| matrix of studentized bootstrap statistics T*_j.
struct BootstrapDraws {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_star;
  BootstrapSpec spec;
  IndexSet targets;
  int failures = 0;
  std::vector<std::string> warnings;

  int B() const { return static_cast<int>(t_star.rows()); }
  int width() const { return static_cast<int>(t_star.cols()); }
};

/// n i.i.d. draws with replacement from the entries of eps_cent.
Vector draw_residual(CounterRng& rng, const Vector& eps_cent);

/// eps*_i = W_i * eps_cent_i with i.i.d. multipliers (EW = 0, EW^2 = 1).
Vector draw_wild(CounterRng& rng, const Vector& eps_cent, Multiplier multiplier);

/// Centered frame for the xyz-paired scheme: every column of X and Z is
/// projected orthogonal to the centered residuals, Y_hat = X_hat beta_hat
/// + eps_cent. Rows of (X_hat, Y_hat, Z_hat) are then resampled i.i.d.
struct XyzFrame {
  Matrix X;
  Vector Y;        // at-estimate response
  Vector Y_null;   // complete-null response (= eps_cent)
  Matrix Z;
};

XyzFrame make_xyz_frame(const DesignMatrix& X, const NodewiseProjection& proj,
                        const LassoFit& fit);

/// Full plug-in bootstrap: per replicate, rebuild Y*, refit the Lasso at
/// the original lambda and recompute b*, se* and T*. The ZCLinear scheme
/// skips the refit and bootstraps only the linear term Z_j^T eps* / Z_j^T X_j.
BootstrapDraws run_bootstrap(const DesignMatrix& X, const ResponseVector& y,
                             const LassoFit& fit, const NodewiseProjection& proj,
                             const BootstrapSpec& spec, int threads = 1,
                             const SolverOptions& solver_options = {},
                             const DesparsOptions& despars_options = {},
                             const LassoWorkspace* workspace = nullptr);

struct CiTable {
  IndexSet targets;
  Vector lower;
  Vector upper;
  Vector p_values;
  std::vector<std::string> warnings;
};

/// Per-target bootstrap CIs [b - q*_{1-a/2} se, b - q*_{a/2} se] with the
/// dual p-value (smallest alpha at which 0 leaves the interval, floored
/// at 1/B).
CiTable individual_ci(const BootstrapDraws& draws, const DesparsResult& res,
                      double alpha);

enum class SimultaneousVariant { MinMax, Abs };

struct SimultaneousCi {
  IndexSet targets;
  Vector lower;
  Vector upper;
  double q_upper = 0.0;  // quantile driving the lower bounds
  double q_lower = 0.0;
};

/// Simultaneous CIs over the draws columns listed in `cols` (positions
/// into draws.t_star; empty = all).
SimultaneousCi simultaneous_ci(const BootstrapDraws& draws,
                               const DesparsResult& res, double alpha,
                               SimultaneousVariant variant,
                               const IndexSet& cols = {});

/// P_G for H_0: beta_j = 0 over the group, from complete-null draws.
/// observed_t aligns with draws columns; `cols` selects the group.
double group_pvalue(const BootstrapDraws& draws_null, const Vector& observed_t,
                    const IndexSet& cols = {});

struct WestfallYoungResult {
  Vector adjusted;          // P_{j,corr}, floored at 1/B
  double t_rej = 0.0;       // (1 - alpha)-quantile of max_k |T*0_k|
  std::vector<double> null_max_abs;  // row-wise max_k |T*0_{b,k}|
};

WestfallYoungResult westfall_young(const BootstrapDraws& draws_null,
                                   const Vector& observed_t, double alpha);

// --- draws serialization (schema documented in the README) ---
void save_draws_binary(const BootstrapDraws& draws, const std::string& path);
BootstrapDraws load_draws_binary(const std::string& path);
void save_draws_csv(const BootstrapDraws& draws, std::ostream& out);

}  // namespace hdboot
