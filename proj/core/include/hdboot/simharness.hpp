#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "hdboot/bootstrap.hpp"
#include "hdboot/data.hpp"

namespace hdboot {

enum class DesignKind { Toeplitz, Identity, ExternalCsv };
enum class SignalKind { U02, U04, Um2p2, Fixed1, Fixed2, Fixed10, None };
enum class NoiseKind { GaussHomo, Chi2Centered, HeteroMammen };

struct ScenarioConfig {
  DesignKind design = DesignKind::Toeplitz;
  double rho = 0.9;             // Toeplitz correlation
  std::string design_csv;       // ExternalCsv source
  int n = 100;
  int p = 100;
  SignalKind signal = SignalKind::None;
  int s0 = 3;
  NoiseKind noise = NoiseKind::GaussHomo;
  int replications = 100;
  std::uint64_t design_seed = 1;
  std::uint64_t signal_seed = 2;
  std::uint64_t replication_seed = 3;

  void validate() const;
};

struct MethodConfig {
  BootstrapSpec boot;           // per-replication seeds are derived internally
  bool use_cv = true;
  int cv_folds = 10;
  int cv_grid_points = 50;
  double cv_grid_ratio = 0.01;
  double fixed_lambda = -1.0;   // used when use_cv is false
  double lambda_x = -1.0;       // < 0: default sqrt(log(p)/n)
  int threads = 1;
  SolverOptions solver;
};

/// Key = value scenario file (one pair per line, '#' comments).
ScenarioConfig parse_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text);

/// Fixed design per the scenario; deterministic in design_seed. For
/// HeteroMammen scenarios each row is additionally scaled by U(1,3)/2.
DesignMatrix gen_design(const ScenarioConfig& cfg);

/// Coefficient vector: s0 nonzero values placed by a seeded permutation.
Vector gen_signal(const ScenarioConfig& cfg);

/// Error vector for one replication (HeteroMammen draws the normal
/// mixture; the response coupling is applied by gen_response).
Vector gen_errors(const ScenarioConfig& cfg, const Matrix& X, CounterRng& rng);

/// Response for one replication: X beta + errors, except HeteroMammen
/// where Y_i = (Q_i + 1) eps_i with Q_i built from the first 5 columns.
Vector gen_response(const ScenarioConfig& cfg, const Matrix& X,
                    const Vector& beta, CounterRng& rng);

/// y + c * X_j (0-based column j).
Vector inject_signal(const DesignMatrix& X, const Vector& y, int j, double c);

struct ExperimentResult {
  ScenarioConfig scenario;
  double alpha = 0.0;
  double lambda_x_used = 0.0;
  Vector true_beta;

  // Coverage experiments: hits(r, j) = 1 when CI_j covered beta0_j in
  // replication r. Baseline rows are normal-approximation coverage.
  Matrix hits;
  Vector coverage;              // per-coefficient mean over replications
  double mean_coverage = 0.0;
  std::optional<Matrix> hits_normal;
  std::optional<Vector> coverage_normal;
  double mean_coverage_normal = 0.0;

  // Multiple-testing experiments.
  std::vector<int> fwer_flags;        // per replication, WY
  std::vector<int> fwer_flags_holm;
  std::vector<double> power_values;   // per replication (empty without signal)
  std::vector<double> power_values_holm;
  std::vector<double> t_rej;          // per replication
  std::vector<double> p_equiv;        // per replication
  double fwer = 0.0, fwer_holm = 0.0;
  double power = 0.0, power_holm = 0.0;
  bool power_defined = false;

  int failed_replications = 0;
};

/// Per-coefficient CI coverage over R replications.
ExperimentResult run_coverage(const ScenarioConfig& cfg, const MethodConfig& method,
                              double alpha, bool with_normal_baseline = false,
                              Studentization baseline_mode = Studentization::Plain);

/// Westfall-Young (and Holm baseline) FWER / power / p_equiv over R
/// replications.
ExperimentResult run_fwer_power(const ScenarioConfig& cfg,
                                const MethodConfig& method, double alpha);

/// Long-format records: scenario,replication,coefficient,metric,value.
void write_long_csv(const ExperimentResult& result, const std::string& name,
                    std::ostream& out);

std::string to_string(DesignKind k);
std::string to_string(SignalKind k);
std::string to_string(NoiseKind k);

}  // namespace hdboot
