#include "hdboot/simharness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hdboot/csv.hpp"
#include "hdboot/detail/parallel.hpp"
#include "hdboot/multiple_testing.hpp"
#include "hdboot/nodewise.hpp"

namespace hdboot {

namespace {
// E[Z^2] for Z ~ U(1,3), used verbatim in the heteroscedastic response.
constexpr double kMeanZSquared = 13.0 / 3.0;
}  // namespace

void ScenarioConfig::validate() const {
  if (design != DesignKind::ExternalCsv) {
    if (n < 2 || p < 1) throw ConfigError("scenario needs n >= 2 and p >= 1");
  }
  if (s0 < 0 || (design != DesignKind::ExternalCsv && s0 > p)) {
    throw ConfigError("scenario needs 0 <= s0 <= p");
  }
  if (replications < 1) throw ConfigError("scenario needs replications >= 1");
  if (noise == NoiseKind::HeteroMammen) {
    if (signal != SignalKind::None) {
      throw ConfigError("heteroscedastic scenario requires signal = none");
    }
    if (design != DesignKind::ExternalCsv && p < 5) {
      throw ConfigError("heteroscedastic scenario requires p >= 5");
    }
  }
}

DesignMatrix gen_design(const ScenarioConfig& cfg) {
  if (cfg.design == DesignKind::ExternalCsv) {
    CsvTable table = read_numeric_csv(cfg.design_csv);
    return DesignMatrix(std::move(table.values));
  }
  Matrix X(cfg.n, cfg.p);
  CounterRng rng(cfg.design_seed, 0);
  const double rho = cfg.rho;
  const double noise_scale = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < cfg.n; ++i) {
    if (cfg.design == DesignKind::Toeplitz) {
      // AR(1) recursion realizes Sigma_{jk} = rho^|j-k| exactly.
      X(i, 0) = rng.normal();
      for (int j = 1; j < cfg.p; ++j) {
        X(i, j) = rho * X(i, j - 1) + noise_scale * rng.normal();
      }
    } else {
      for (int j = 0; j < cfg.p; ++j) X(i, j) = rng.normal();
    }
    if (cfg.noise == NoiseKind::HeteroMammen) {
      X.row(i) *= rng.uniform(1.0, 3.0) / 2.0;
    }
  }
  return DesignMatrix(std::move(X));
}

Vector gen_signal(const ScenarioConfig& cfg) {
  Vector beta = Vector::Zero(cfg.p);
  if (cfg.signal == SignalKind::None) return beta;
  CounterRng rng(cfg.signal_seed, 0);
  for (int k = 0; k < cfg.s0; ++k) {
    switch (cfg.signal) {
      case SignalKind::U02: beta[k] = rng.uniform(0.0, 2.0); break;
      case SignalKind::U04: beta[k] = rng.uniform(0.0, 4.0); break;
      case SignalKind::Um2p2: beta[k] = rng.uniform(-2.0, 2.0); break;
      case SignalKind::Fixed1: beta[k] = 1.0; break;
      case SignalKind::Fixed2: beta[k] = 2.0; break;
      case SignalKind::Fixed10: beta[k] = 10.0; break;
      case SignalKind::None: break;
    }
  }
  for (int i = cfg.p - 1; i >= 1; --i) {
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(beta[i], beta[j]);
  }
  return beta;
}

Vector gen_errors(const ScenarioConfig& cfg, const Matrix& X, CounterRng& rng) {
  const auto n = X.rows();
  Vector eps(n);
  switch (cfg.noise) {
    case NoiseKind::GaussHomo:
      for (Eigen::Index i = 0; i < n; ++i) eps[i] = rng.normal();
      break;
    case NoiseKind::Chi2Centered:
      for (Eigen::Index i = 0; i < n; ++i) {
        eps[i] = (rng.chi_squared_1() - 1.0) / std::sqrt(2.0);
      }
      break;
    case NoiseKind::HeteroMammen:
      for (Eigen::Index i = 0; i < n; ++i) {
        // Fixed draw order (l, zeta, eta) keeps the stream layout stable.
        const double l = rng.bernoulli(0.5) ? 1.0 : 0.0;
        const double zeta = rng.normal(0.5, 1.2);
        const double eta = rng.normal(-0.5, 0.7);
        eps[i] = l * zeta + (l - 1.0) * eta;
      }
      break;
  }
  return eps;
}

Vector gen_response(const ScenarioConfig& cfg, const Matrix& X,
                    const Vector& beta, CounterRng& rng) {
  Vector eps = gen_errors(cfg, X, rng);
  if (cfg.noise == NoiseKind::HeteroMammen) {
    if (X.cols() < 5) throw ConfigError("heteroscedastic response needs p >= 5");
    Vector y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double q = X.row(i).head(5).squaredNorm() - kMeanZSquared;
      y[i] = (q + 1.0) * eps[i];
    }
    return y;
  }
  return X * beta + eps;
}

Vector inject_signal(const DesignMatrix& X, const Vector& y, int j, double c) {
  if (j < 0 || j >= X.p()) {
    throw ConfigError("inject_signal: column " + std::to_string(j) + " out of range");
  }
  if (y.size() != X.n()) throw DimensionMismatch("inject_signal: length mismatch");
  return y + c * X.values().col(j);
}

// --- scenario file parsing ---

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

SignalKind parse_signal(const std::string& raw) {
  const std::string v = lower(raw);
  if (v == "u(0,2)") return SignalKind::U02;
  if (v == "u(0,4)") return SignalKind::U04;
  if (v == "u(-2,2)") return SignalKind::Um2p2;
  if (v == "fixed(1)") return SignalKind::Fixed1;
  if (v == "fixed(2)") return SignalKind::Fixed2;
  if (v == "fixed(10)") return SignalKind::Fixed10;
  if (v == "none") return SignalKind::None;
  throw ConfigError("unknown signal '" + raw + "'");
}

NoiseKind parse_noise(const std::string& raw) {
  const std::string v = lower(raw);
  if (v == "gauss" || v == "gauss_homo") return NoiseKind::GaussHomo;
  if (v == "chi2" || v == "chi2_centered") return NoiseKind::Chi2Centered;
  if (v == "hetero_mammen" || v == "mammen") return NoiseKind::HeteroMammen;
  throw ConfigError("unknown errors '" + raw + "'");
}

DesignKind parse_design(const std::string& raw) {
  const std::string v = lower(raw);
  if (v == "toeplitz") return DesignKind::Toeplitz;
  if (v == "identity") return DesignKind::Identity;
  if (v == "csv" || v == "external_csv") return DesignKind::ExternalCsv;
  throw ConfigError("unknown design '" + raw + "'");
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("scenario line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "design") cfg.design = parse_design(value);
      else if (key == "rho") cfg.rho = std::stod(value);
      else if (key == "design_csv") cfg.design_csv = value;
      else if (key == "n") cfg.n = std::stoi(value);
      else if (key == "p") cfg.p = std::stoi(value);
      else if (key == "signal") cfg.signal = parse_signal(value);
      else if (key == "s0") cfg.s0 = std::stoi(value);
      else if (key == "errors") cfg.noise = parse_noise(value);
      else if (key == "replications") cfg.replications = std::stoi(value);
      else if (key == "design_seed") cfg.design_seed = std::stoull(value);
      else if (key == "signal_seed") cfg.signal_seed = std::stoull(value);
      else if (key == "replication_seed") cfg.replication_seed = std::stoull(value);
      else throw ConfigError("unknown scenario key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("scenario line " + std::to_string(line_no) +
                        ": cannot parse value '" + value + "' for key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

// --- experiment drivers ---

namespace {

// Per-replication stream layout under cfg.replication_seed:
//   stream 4r   : response draws
//   stream 4r+1 : first output seeds the CV fold shuffle
//   stream 4r+2 : first output seeds the bootstrap replicate streams
struct ReplicationSeeds {
  CounterRng response;
  std::uint64_t cv_seed;
  std::uint64_t boot_seed;
  explicit ReplicationSeeds(std::uint64_t base, int rep)
      : response(base, 4ull * static_cast<std::uint64_t>(rep)),
        cv_seed(CounterRng(base, 4ull * static_cast<std::uint64_t>(rep) + 1).next_u64()),
        boot_seed(CounterRng(base, 4ull * static_cast<std::uint64_t>(rep) + 2).next_u64()) {}
};

double choose_lambda(const DesignMatrix& X, const ResponseVector& y,
                     const MethodConfig& method, std::uint64_t cv_seed) {
  if (!method.use_cv) {
    if (method.fixed_lambda < 0.0) {
      throw ConfigError("fixed_lambda must be set when CV is disabled");
    }
    return method.fixed_lambda;
  }
  const auto grid = default_lambda_grid(X, y, method.cv_grid_points,
                                        method.cv_grid_ratio);
  return select_lambda_cv(X, y, method.cv_folds, grid, cv_seed, method.solver);
}

struct SharedSetup {
  DesignMatrix X;
  Vector beta;
  double lambda_x;
  LassoWorkspace workspace;
  NodewiseProjection proj;
};

SharedSetup prepare(const ScenarioConfig& cfg, const MethodConfig& method) {
  cfg.validate();
  DesignMatrix X = gen_design(cfg);
  ScenarioConfig dims = cfg;
  dims.n = X.n();
  dims.p = X.p();
  if (dims.s0 > dims.p) throw ConfigError("s0 exceeds design width");
  Vector beta = gen_signal(dims);
  const double lambda_x =
      method.lambda_x < 0.0 ? default_lambda_x(X.n(), X.p()) : method.lambda_x;
  LassoWorkspace ws(X.values());
  NodewiseProjection proj =
      nodewise_residuals(X, lambda_x, all_targets(X.p()), method.solver, &ws);
  return SharedSetup{std::move(X), std::move(beta), lambda_x, std::move(ws),
                     std::move(proj)};
}

void check_failures(int failed, int total) {
  if (failed * 10 > total) {
    throw ReplicateFailure(std::to_string(failed) + " of " +
                           std::to_string(total) + " replications failed");
  }
}

}  // namespace

ExperimentResult run_coverage(const ScenarioConfig& cfg, const MethodConfig& method,
                              double alpha, bool with_normal_baseline,
                              Studentization baseline_mode) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in [0, 1)");
  }
  SharedSetup setup = prepare(cfg, method);
  const int n = setup.X.n();
  const int p = setup.X.p();
  const int R = cfg.replications;

  ExperimentResult result;
  result.scenario = cfg;
  result.alpha = alpha;
  result.lambda_x_used = setup.lambda_x;
  result.true_beta = setup.beta;
  result.hits = Matrix::Constant(R, p, -1.0);
  if (with_normal_baseline) result.hits_normal = Matrix::Constant(R, p, -1.0);

  DesparsOptions despars_opts;
  despars_opts.cross_check = false;  // verified separately by the test suite

  detail::parallel_for(R, method.threads, [&](int rep) {
    ReplicationSeeds seeds(cfg.replication_seed, rep);
    try {
      Vector yv = gen_response(cfg, setup.X.values(), setup.beta, seeds.response);
      ResponseVector y(std::move(yv));
      const double lambda = choose_lambda(setup.X, y, method, seeds.cv_seed);
      LassoFit fit =
          fit_lasso(setup.X, y, lambda, method.solver, &setup.workspace);
      DesparsResult res = desparsify(setup.X, y, fit, setup.proj, despars_opts);

      if (alpha == 0.0) {
        // Infinite intervals: everything is covered.
        result.hits.row(rep).setOnes();
        if (result.hits_normal) result.hits_normal->row(rep).setOnes();
        return;
      }

      BootstrapSpec spec = method.boot;
      spec.center = Center::AtEstimate;
      spec.seed = seeds.boot_seed;
      BootstrapDraws draws = run_bootstrap(setup.X, y, fit, setup.proj, spec, 1,
                                           method.solver, despars_opts,
                                           &setup.workspace);
      CiTable ci = individual_ci(draws, res, alpha);
      for (int j = 0; j < p; ++j) {
        const double truth = setup.beta[j];
        result.hits(rep, j) =
            (ci.lower[j] <= truth && truth <= ci.upper[j]) ? 1.0 : 0.0;
      }
      if (result.hits_normal) {
        NormalInference ni = normal_approx_inference(res, alpha, baseline_mode);
        for (int j = 0; j < p; ++j) {
          const double truth = setup.beta[j];
          (*result.hits_normal)(rep, j) =
              (ni.lower[j] <= truth && truth <= ni.upper[j]) ? 1.0 : 0.0;
        }
      }
    } catch (const Error&) {
      result.hits.row(rep).setConstant(-1.0);
    }
  });

  result.coverage = Vector::Zero(p);
  if (with_normal_baseline) result.coverage_normal = Vector::Zero(p);
  int ok = 0;
  for (int rep = 0; rep < R; ++rep) {
    if (result.hits(rep, 0) < 0.0) {
      ++result.failed_replications;
      continue;
    }
    ++ok;
    result.coverage += result.hits.row(rep).transpose();
    if (result.coverage_normal) {
      *result.coverage_normal += result.hits_normal->row(rep).transpose();
    }
  }
  check_failures(result.failed_replications, R);
  result.coverage /= static_cast<double>(ok);
  result.mean_coverage = result.coverage.mean();
  if (result.coverage_normal) {
    *result.coverage_normal /= static_cast<double>(ok);
    result.mean_coverage_normal = result.coverage_normal->mean();
  }
  return result;
}

ExperimentResult run_fwer_power(const ScenarioConfig& cfg,
                                const MethodConfig& method, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  SharedSetup setup = prepare(cfg, method);
  const int p = setup.X.p();
  const int R = cfg.replications;

  ExperimentResult result;
  result.scenario = cfg;
  result.alpha = alpha;
  result.lambda_x_used = setup.lambda_x;
  result.true_beta = setup.beta;

  IndexSet active;
  for (int j = 0; j < p; ++j) {
    if (setup.beta[j] != 0.0) active.push_back(j);
  }
  result.power_defined = !active.empty();

  std::vector<int> wy_flag(R, -1), holm_flag(R, -1);
  std::vector<double> wy_power(R, -1.0), holm_power(R, -1.0);
  std::vector<double> trej(R, -1.0), pequiv(R, -1.0);

  DesparsOptions despars_opts;
  despars_opts.cross_check = false;

  detail::parallel_for(R, method.threads, [&](int rep) {
    ReplicationSeeds seeds(cfg.replication_seed, rep);
    try {
      Vector yv = gen_response(cfg, setup.X.values(), setup.beta, seeds.response);
      ResponseVector y(std::move(yv));
      const double lambda = choose_lambda(setup.X, y, method, seeds.cv_seed);
      LassoFit fit =
          fit_lasso(setup.X, y, lambda, method.solver, &setup.workspace);
      DesparsResult res = desparsify(setup.X, y, fit, setup.proj, despars_opts);
      const Vector t_obs =
          studentize(res, Vector::Zero(p), method.boot.studentization);

      BootstrapSpec spec = method.boot;
      spec.center = Center::CompleteNull;
      spec.seed = seeds.boot_seed;
      BootstrapDraws draws = run_bootstrap(setup.X, y, fit, setup.proj, spec, 1,
                                           method.solver, despars_opts,
                                           &setup.workspace);
      WestfallYoungResult wy = westfall_young(draws, t_obs, alpha);

      NormalInference ni =
          normal_approx_inference(res, alpha, method.boot.studentization);
      std::vector<double> raw(static_cast<std::size_t>(p));
      for (int j = 0; j < p; ++j) raw[static_cast<std::size_t>(j)] = ni.p_values[j];
      const std::vector<double> holm = holm_adjust(raw);

      int wy_false = 0, holm_false = 0, wy_true = 0, holm_true = 0;
      for (int j = 0; j < p; ++j) {
        const bool is_active = setup.beta[j] != 0.0;
        const bool rej_wy = wy.adjusted[j] <= alpha;
        const bool rej_holm = holm[static_cast<std::size_t>(j)] <= alpha;
        if (is_active) {
          wy_true += rej_wy;
          holm_true += rej_holm;
        } else {
          wy_false += rej_wy;
          holm_false += rej_holm;
        }
      }
      wy_flag[static_cast<std::size_t>(rep)] = wy_false > 0 ? 1 : 0;
      holm_flag[static_cast<std::size_t>(rep)] = holm_false > 0 ? 1 : 0;
      if (!active.empty()) {
        wy_power[static_cast<std::size_t>(rep)] =
            static_cast<double>(wy_true) / static_cast<double>(active.size());
        holm_power[static_cast<std::size_t>(rep)] =
            static_cast<double>(holm_true) / static_cast<double>(active.size());
      }
      trej[static_cast<std::size_t>(rep)] = wy.t_rej;
      pequiv[static_cast<std::size_t>(rep)] = equivalent_tests(wy.t_rej, alpha);
    } catch (const Error&) {
      // leave the -1 failure markers in place
    }
  });

  double fwer_sum = 0.0, fwer_holm_sum = 0.0, power_sum = 0.0, power_holm_sum = 0.0;
  int ok = 0;
  for (int rep = 0; rep < R; ++rep) {
    if (wy_flag[static_cast<std::size_t>(rep)] < 0) {
      ++result.failed_replications;
      continue;
    }
    ++ok;
    result.fwer_flags.push_back(wy_flag[static_cast<std::size_t>(rep)]);
    result.fwer_flags_holm.push_back(holm_flag[static_cast<std::size_t>(rep)]);
    result.t_rej.push_back(trej[static_cast<std::size_t>(rep)]);
    result.p_equiv.push_back(pequiv[static_cast<std::size_t>(rep)]);
    fwer_sum += wy_flag[static_cast<std::size_t>(rep)];
    fwer_holm_sum += holm_flag[static_cast<std::size_t>(rep)];
    if (result.power_defined) {
      result.power_values.push_back(wy_power[static_cast<std::size_t>(rep)]);
      result.power_values_holm.push_back(holm_power[static_cast<std::size_t>(rep)]);
      power_sum += wy_power[static_cast<std::size_t>(rep)];
      power_holm_sum += holm_power[static_cast<std::size_t>(rep)];
    }
  }
  check_failures(result.failed_replications, R);
  result.fwer = fwer_sum / ok;
  result.fwer_holm = fwer_holm_sum / ok;
  if (result.power_defined) {
    result.power = power_sum / ok;
    result.power_holm = power_holm_sum / ok;
  }
  return result;
}

void write_long_csv(const ExperimentResult& result, const std::string& name,
                    std::ostream& out) {
  out << "scenario,replication,coefficient,metric,value\n";
  out.precision(17);
  if (result.hits.size() > 0) {
    for (Eigen::Index rep = 0; rep < result.hits.rows(); ++rep) {
      if (result.hits(rep, 0) < 0.0) continue;
      for (Eigen::Index j = 0; j < result.hits.cols(); ++j) {
        out << name << "," << rep << "," << j << ",cover," << result.hits(rep, j)
            << "\n";
        if (result.hits_normal) {
          out << name << "," << rep << "," << j << ",cover_normal,"
              << (*result.hits_normal)(rep, j) << "\n";
        }
      }
    }
  }
  for (std::size_t r = 0; r < result.fwer_flags.size(); ++r) {
    out << name << "," << r << ",,wy_false_rejection," << result.fwer_flags[r]
        << "\n";
    out << name << "," << r << ",,holm_false_rejection,"
        << result.fwer_flags_holm[r] << "\n";
    out << name << "," << r << ",,t_rej," << result.t_rej[r] << "\n";
    out << name << "," << r << ",,p_equiv," << result.p_equiv[r] << "\n";
    if (result.power_defined) {
      out << name << "," << r << ",,wy_power," << result.power_values[r] << "\n";
      out << name << "," << r << ",,holm_power," << result.power_values_holm[r]
          << "\n";
    }
  }
}

std::string to_string(DesignKind k) {
  switch (k) {
    case DesignKind::Toeplitz: return "toeplitz";
    case DesignKind::Identity: return "identity";
    case DesignKind::ExternalCsv: return "csv";
  }
  return "?";
}

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::U02: return "u(0,2)";
    case SignalKind::U04: return "u(0,4)";
    case SignalKind::Um2p2: return "u(-2,2)";
    case SignalKind::Fixed1: return "fixed(1)";
    case SignalKind::Fixed2: return "fixed(2)";
    case SignalKind::Fixed10: return "fixed(10)";
    case SignalKind::None: return "none";
  }
  return "?";
}

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::GaussHomo: return "gauss";
    case NoiseKind::Chi2Centered: return "chi2";
    case NoiseKind::HeteroMammen: return "hetero_mammen";
  }
  return "?";
}

}  // namespace hdboot
