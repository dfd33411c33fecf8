// hdboot command-line front end.
//
// Subcommands: fit, infer, simulate, rerun. JSON results on stdout,
// progress on stderr. Exit codes: 0 ok, 2 usage, 3 data, 4 numerical.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdboot/bootstrap.hpp"
#include "hdboot/csv.hpp"
#include "hdboot/despars.hpp"
#include "hdboot/lasso.hpp"
#include "hdboot/multiple_testing.hpp"
#include "hdboot/nodewise.hpp"
#include "hdboot/simharness.hpp"
#include "hdboot/version.hpp"

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

int exit_code(hdboot::ErrorKind kind) {
  switch (kind) {
    case hdboot::ErrorKind::Usage: return 2;
    case hdboot::ErrorKind::Data: return 3;
    case hdboot::ErrorKind::Numerical: return 4;
  }
  return 4;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hdboot::ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json options = json::object();
  json inputs = json::array();

  void add_input(const std::string& path) {
    inputs.push_back({{"path", path}, {"fnv1a", hex(fnv1a(read_file(path)))}});
  }

  json finish(double seconds) const {
    return {{"command", command}, {"argv", argv},   {"options", options},
            {"inputs", inputs},   {"version", hdboot::kVersion},
            {"wall_seconds", seconds}};
  }
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw hdboot::ParseError("cannot write " + out_path);
    out << doc.dump(2) << "\n";
  }
}

// --- data loading ---

struct Dataset {
  hdboot::DesignMatrix X;
  hdboot::ResponseVector y;
  std::vector<std::string> predictors;
  std::string response;
};

Dataset load_dataset(const std::string& path, const std::string& response) {
  hdboot::CsvTable table = hdboot::read_numeric_csv(path);
  if (table.columns.size() < 2) {
    throw hdboot::ParseError(path + " needs a response and at least one predictor");
  }
  std::size_t y_col = 0;
  if (!response.empty()) {
    auto it = std::find(table.columns.begin(), table.columns.end(), response);
    if (it == table.columns.end()) {
      throw hdboot::ConfigError("no column named '" + response + "' in " + path);
    }
    y_col = static_cast<std::size_t>(it - table.columns.begin());
  }
  const auto n = table.values.rows();
  const auto p = table.values.cols() - 1;
  hdboot::Matrix X(n, p);
  std::vector<std::string> names;
  Eigen::Index out = 0;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c == y_col) continue;
    const auto col = table.values.col(static_cast<Eigen::Index>(c));
    if (col.cwiseAbs().maxCoeff() == 0.0) {
      throw hdboot::Unidentifiable("predictor column '" + table.columns[c] +
                                   "' in " + path + " is identically zero");
    }
    X.col(out++) = col;
    names.push_back(table.columns[c]);
  }
  return Dataset{hdboot::DesignMatrix(std::move(X)),
                 hdboot::ResponseVector(table.values.col(static_cast<Eigen::Index>(y_col))),
                 std::move(names), table.columns[y_col]};
}

json vec_to_json(const hdboot::Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// --- shared flag bundles ---

struct LambdaFlags {
  double lambda = -1.0;  // < 0: cross-validate
  int cv_folds = 10;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "Penalty level (default: 10-fold CV)");
    cmd->add_option("--cv-folds", cv_folds, "CV folds")->check(CLI::Range(2, 1000));
    cmd->add_option("--seed", seed, "Seed for CV split and bootstrap draws");
  }

  double resolve(const hdboot::DesignMatrix& X, const hdboot::ResponseVector& y,
                 const hdboot::SolverOptions& solver, std::string* source) const {
    if (lambda >= 0.0) {
      *source = "fixed";
      return lambda;
    }
    *source = "cv";
    const auto grid = hdboot::default_lambda_grid(X, y);
    // CV draws from a stream far away from the bootstrap replicate streams.
    const std::uint64_t cv_seed = hdboot::CounterRng(seed, ~0ULL).next_u64();
    return hdboot::select_lambda_cv(X, y, cv_folds, grid, cv_seed, solver);
  }
};

int default_threads() {
  if (const char* env = std::getenv("HDBOOT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
    throw hdboot::ConfigError("HDBOOT_THREADS must be a positive integer");
  }
  return 1;
}

// --- fit ---

struct FitArgs {
  std::string input;
  std::string response;
  std::string out;
  std::string manifest_out;
  LambdaFlags lambda;
  bool desparsify = false;
  double lambda_x = -1.0;
};

int run_fit(const FitArgs& args, const std::vector<std::string>& argv) {
  Timer timer;
  Dataset data = load_dataset(args.input, args.response);
  hdboot::check_paired(data.X, data.y);

  hdboot::SolverOptions solver;
  std::string lambda_source;
  const double lambda = args.lambda.resolve(data.X, data.y, solver, &lambda_source);
  hdboot::LassoWorkspace ws(data.X.values());
  hdboot::LassoFit fit = hdboot::fit_lasso(data.X, data.y, lambda, solver, &ws);

  json doc = {{"schema_version", kSchemaVersion},
              {"command", "fit"},
              {"response", data.response},
              {"predictors", data.predictors},
              {"lambda", fit.lambda},
              {"lambda_source", lambda_source},
              {"beta", vec_to_json(fit.beta)},
              {"active_set", fit.active_set},
              {"s_hat", fit.s_hat},
              {"duality_gap", fit.duality_gap},
              {"iterations", fit.iterations}};
  if (std::isfinite(fit.sigma_hat)) doc["sigma_hat"] = fit.sigma_hat;

  double lambda_x = args.lambda_x;
  if (args.desparsify) {
    if (lambda_x < 0.0) lambda_x = hdboot::default_lambda_x(data.X.n(), data.X.p());
    auto proj = hdboot::nodewise_residuals(data.X, lambda_x,
                                           hdboot::all_targets(data.X.p()),
                                           solver, &ws);
    auto res = hdboot::desparsify(data.X, data.y, fit, proj);
    doc["desparsified"] = {{"lambda_x", lambda_x},
                           {"b_hat", vec_to_json(res.b_hat)},
                           {"se_plain", vec_to_json(res.se_plain)},
                           {"se_robust", vec_to_json(res.se_robust)},
                           {"warnings", res.warnings}};
  }

  Manifest manifest;
  manifest.command = "fit";
  manifest.argv = argv;
  manifest.add_input(args.input);
  manifest.options = {{"response", data.response},
                      {"lambda", fit.lambda},
                      {"lambda_source", lambda_source},
                      {"cv_folds", args.lambda.cv_folds},
                      {"seed", args.lambda.seed},
                      {"desparsify", args.desparsify},
                      {"lambda_x", lambda_x}};
  doc["manifest"] = manifest.finish(timer.seconds());
  if (!args.manifest_out.empty()) emit(doc["manifest"], args.manifest_out);
  emit(doc, args.out);
  return 0;
}

// --- infer ---

struct InferArgs {
  std::string input;
  std::string response;
  std::string out;
  std::string out_csv;
  std::string manifest_out;
  LambdaFlags lambda;
  double lambda_x = -1.0;
  double alpha = 0.05;
  std::string scheme = "wild";
  std::string multiplier = "gaussian";
  int b = 1000;
  bool plain = false;
  bool wy = false;
  std::string simultaneous;
  std::vector<int> group;
  int threads = 0;
};

hdboot::Scheme parse_scheme(const std::string& v) {
  if (v == "residual") return hdboot::Scheme::Residual;
  if (v == "wild") return hdboot::Scheme::Wild;
  if (v == "xyz") return hdboot::Scheme::XYZPaired;
  if (v == "zclinear") return hdboot::Scheme::ZCLinear;
  throw hdboot::ConfigError("unknown scheme '" + v + "'");
}

hdboot::Multiplier parse_multiplier(const std::string& v) {
  if (v == "gaussian") return hdboot::Multiplier::Gaussian;
  if (v == "rademacher") return hdboot::Multiplier::Rademacher;
  if (v == "mammen") return hdboot::Multiplier::MammenTwoPoint;
  throw hdboot::ConfigError("unknown multiplier '" + v + "'");
}

int run_infer(const InferArgs& args, const std::vector<std::string>& argv) {
  Timer timer;
  Dataset data = load_dataset(args.input, args.response);
  hdboot::check_paired(data.X, data.y);
  const int p = data.X.p();
  const int threads = args.threads > 0 ? args.threads : default_threads();
  for (int j : args.group) {
    if (j < 0 || j >= p) {
      throw hdboot::ConfigError("--group index " + std::to_string(j) +
                                " out of range [0, " + std::to_string(p) + ")");
    }
  }

  hdboot::SolverOptions solver;
  std::string lambda_source;
  const double lambda = args.lambda.resolve(data.X, data.y, solver, &lambda_source);
  hdboot::LassoWorkspace ws(data.X.values());
  hdboot::LassoFit fit = hdboot::fit_lasso(data.X, data.y, lambda, solver, &ws);

  const double lambda_x =
      args.lambda_x < 0.0 ? hdboot::default_lambda_x(data.X.n(), p) : args.lambda_x;
  std::cerr << "[infer] nodewise projections (p = " << p << ")\n";
  auto proj = hdboot::nodewise_residuals(data.X, lambda_x, hdboot::all_targets(p),
                                         solver, &ws);
  auto res = hdboot::desparsify(data.X, data.y, fit, proj);

  hdboot::BootstrapSpec spec;
  spec.scheme = parse_scheme(args.scheme);
  spec.multiplier = parse_multiplier(args.multiplier);
  spec.B = args.b;
  spec.studentization =
      args.plain ? hdboot::Studentization::Plain : hdboot::Studentization::Robust;
  spec.center = hdboot::Center::AtEstimate;
  spec.seed = args.lambda.seed;

  std::cerr << "[infer] bootstrap, B = " << spec.B << ", scheme = " << args.scheme
            << "\n";
  auto draws = hdboot::run_bootstrap(data.X, data.y, fit, proj, spec, threads,
                                     solver, {}, &ws);
  auto ci = hdboot::individual_ci(draws, res, args.alpha);
  auto normal = hdboot::normal_approx_inference(res, args.alpha, spec.studentization);

  json doc = {{"schema_version", kSchemaVersion},
              {"command", "infer"},
              {"response", data.response},
              {"predictors", data.predictors},
              {"alpha", args.alpha},
              {"scheme", args.scheme},
              {"multiplier", args.multiplier},
              {"b", args.b},
              {"studentization", args.plain ? "plain" : "robust"},
              {"lambda", fit.lambda},
              {"lambda_source", lambda_source},
              {"lambda_x", lambda_x},
              {"b_hat", vec_to_json(res.b_hat)},
              {"se", vec_to_json(res.se(spec.studentization))},
              {"lower", vec_to_json(ci.lower)},
              {"upper", vec_to_json(ci.upper)},
              {"p_boot", vec_to_json(ci.p_values)},
              {"p_normal", vec_to_json(normal.p_values)},
              {"bootstrap_failures", draws.failures},
              {"warnings", draws.warnings}};

  if (!args.simultaneous.empty()) {
    hdboot::SimultaneousVariant variant;
    if (args.simultaneous == "minmax") variant = hdboot::SimultaneousVariant::MinMax;
    else if (args.simultaneous == "abs") variant = hdboot::SimultaneousVariant::Abs;
    else throw hdboot::ConfigError("--simultaneous must be minmax or abs");
    auto sim = hdboot::simultaneous_ci(draws, res, args.alpha, variant);
    doc["simultaneous"] = {{"variant", args.simultaneous},
                           {"lower", vec_to_json(sim.lower)},
                           {"upper", vec_to_json(sim.upper)}};
  }

  std::optional<hdboot::WestfallYoungResult> wy_result;
  if (args.wy || !args.group.empty()) {
    hdboot::BootstrapSpec null_spec = spec;
    null_spec.center = hdboot::Center::CompleteNull;
    std::cerr << "[infer] complete-null bootstrap for multiple testing\n";
    auto null_draws = hdboot::run_bootstrap(data.X, data.y, fit, proj, null_spec,
                                            threads, solver, {}, &ws);
    const hdboot::Vector t_obs =
        hdboot::studentize(res, hdboot::Vector::Zero(p), spec.studentization);
    if (args.wy) {
      wy_result = hdboot::westfall_young(null_draws, t_obs, args.alpha);
      doc["westfall_young"] = {
          {"adjusted_p", vec_to_json(wy_result->adjusted)},
          {"t_rej", wy_result->t_rej},
          {"p_equiv", hdboot::equivalent_tests(wy_result->t_rej, args.alpha)}};
    }
    if (!args.group.empty()) {
      doc["group"] = {{"indices", args.group},
                      {"p_value", hdboot::group_pvalue(null_draws, t_obs, args.group)}};
    }
  }

  Manifest manifest;
  manifest.command = "infer";
  manifest.argv = argv;
  manifest.add_input(args.input);
  manifest.options = {{"response", data.response}, {"alpha", args.alpha},
                      {"scheme", args.scheme},     {"multiplier", args.multiplier},
                      {"b", args.b},               {"seed", args.lambda.seed},
                      {"lambda", fit.lambda},      {"lambda_source", lambda_source},
                      {"lambda_x", lambda_x},      {"threads", threads},
                      {"studentization", args.plain ? "plain" : "robust"}};
  doc["manifest"] = manifest.finish(timer.seconds());
  if (!args.manifest_out.empty()) emit(doc["manifest"], args.manifest_out);

  if (!args.out_csv.empty()) {
    std::ofstream csv(args.out_csv, std::ios::binary);
    if (!csv) throw hdboot::ParseError("cannot write " + args.out_csv);
    csv.precision(17);
    csv << "variable,b_hat,se,lower,upper,p_boot,p_normal";
    if (wy_result) csv << ",p_wy";
    csv << "\n";
    for (int j = 0; j < p; ++j) {
      csv << data.predictors[static_cast<std::size_t>(j)] << "," << res.b_hat[j]
          << "," << res.se(spec.studentization)[j] << "," << ci.lower[j] << ","
          << ci.upper[j] << "," << ci.p_values[j] << "," << normal.p_values[j];
      if (wy_result) csv << "," << wy_result->adjusted[j];
      csv << "\n";
    }
  }
  emit(doc, args.out);
  return 0;
}

// --- simulate ---

struct SimulateArgs {
  std::string scenario;
  std::string experiment = "coverage";
  std::string out_prefix = "hdboot_sim";
  double alpha = 0.05;
  std::string scheme = "residual";
  std::string multiplier = "gaussian";
  int b = 500;
  bool plain = false;
  bool normal_baseline = false;
  double fixed_lambda = -1.0;
  double lambda_x = -1.0;
  int threads = 0;
};

int run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv) {
  Timer timer;
  hdboot::ScenarioConfig cfg = hdboot::parse_scenario_file(args.scenario);

  hdboot::MethodConfig method;
  method.boot.scheme = parse_scheme(args.scheme);
  method.boot.multiplier = parse_multiplier(args.multiplier);
  method.boot.B = args.b;
  method.boot.studentization =
      args.plain ? hdboot::Studentization::Plain : hdboot::Studentization::Robust;
  method.use_cv = args.fixed_lambda < 0.0;
  method.fixed_lambda = args.fixed_lambda;
  method.lambda_x = args.lambda_x;
  method.threads = args.threads > 0 ? args.threads : default_threads();

  std::cerr << "[simulate] " << hdboot::to_string(cfg.design) << " n = " << cfg.n
            << ", p = " << cfg.p << ", R = " << cfg.replications << "\n";

  hdboot::ExperimentResult result;
  json summary = {{"schema_version", kSchemaVersion},
                  {"command", "simulate"},
                  {"experiment", args.experiment},
                  {"alpha", args.alpha},
                  {"scheme", args.scheme},
                  {"b", args.b},
                  {"design", hdboot::to_string(cfg.design)},
                  {"signal", hdboot::to_string(cfg.signal)},
                  {"errors", hdboot::to_string(cfg.noise)},
                  {"n", cfg.n},
                  {"p", cfg.p},
                  {"replications", cfg.replications}};
  if (args.experiment == "coverage") {
    result = hdboot::run_coverage(cfg, method, args.alpha, args.normal_baseline);
    summary["mean_coverage"] = result.mean_coverage;
    summary["coverage"] = vec_to_json(result.coverage);
    if (result.coverage_normal) {
      summary["mean_coverage_normal"] = result.mean_coverage_normal;
    }
  } else if (args.experiment == "multiple-testing") {
    result = hdboot::run_fwer_power(cfg, method, args.alpha);
    summary["fwer"] = result.fwer;
    summary["fwer_holm"] = result.fwer_holm;
    if (result.power_defined) {
      summary["power"] = result.power;
      summary["power_holm"] = result.power_holm;
    }
  } else {
    throw hdboot::ConfigError("--experiment must be coverage or multiple-testing");
  }
  summary["failed_replications"] = result.failed_replications;
  summary["lambda_x"] = result.lambda_x_used;

  const std::string csv_path = args.out_prefix + ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw hdboot::ParseError("cannot write " + csv_path);
  hdboot::write_long_csv(result, args.out_prefix, csv);

  Manifest manifest;
  manifest.command = "simulate";
  manifest.argv = argv;
  manifest.add_input(args.scenario);
  manifest.options = {{"experiment", args.experiment},
                      {"alpha", args.alpha},
                      {"scheme", args.scheme},
                      {"multiplier", args.multiplier},
                      {"b", args.b},
                      {"studentization", args.plain ? "plain" : "robust"},
                      {"fixed_lambda", args.fixed_lambda},
                      {"lambda_x", result.lambda_x_used},
                      {"threads", method.threads},
                      {"design_seed", cfg.design_seed},
                      {"signal_seed", cfg.signal_seed},
                      {"replication_seed", cfg.replication_seed}};
  summary["manifest"] = manifest.finish(timer.seconds());
  emit(summary, args.out_prefix + ".json");
  std::cerr << "[simulate] wrote " << csv_path << " and " << args.out_prefix
            << ".json\n";
  return 0;
}

int dispatch(std::vector<std::string> argv);

// Replays the argv recorded in a manifest file.
int run_rerun(const std::string& manifest_path) {
  json manifest = json::parse(read_file(manifest_path));
  if (!manifest.contains("argv")) {
    // Tolerate a full result document as input too.
    if (manifest.contains("manifest")) manifest = manifest["manifest"];
    else throw hdboot::ParseError(manifest_path + " has no argv record");
  }
  std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
  // Refuse to replay against inputs that changed since the recorded run.
  for (const auto& input : manifest.value("inputs", json::array())) {
    const std::string path = input.at("path").get<std::string>();
    const std::string now = hex(fnv1a(read_file(path)));
    const std::string then = input.at("fnv1a").get<std::string>();
    if (now != then) {
      throw hdboot::ParseError(path + " changed since the manifest was written (hash " +
                               now + ", recorded " + then + ")");
    }
  }
  return dispatch(std::move(argv));
}

int dispatch(std::vector<std::string> argv) {
  CLI::App app{"High-dimensional inference via the bootstrapped de-sparsified Lasso"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Lasso fit (optionally de-sparsified)");
  fit->add_option("input", fit_args.input, "Input CSV")->required();
  fit->add_option("--response", fit_args.response,
                  "Response column name (default: first column)");
  fit->add_option("--out", fit_args.out, "Write JSON here instead of stdout");
  fit->add_option("--manifest", fit_args.manifest_out, "Also write the manifest here");
  fit->add_flag("--desparsify", fit_args.desparsify, "Add b_hat and standard errors");
  fit->add_option("--lambda-x", fit_args.lambda_x, "Nodewise penalty");
  fit_args.lambda.attach(fit);

  InferArgs infer_args;
  auto* infer = app.add_subcommand("infer", "Bootstrap confidence intervals and tests");
  infer->add_option("input", infer_args.input, "Input CSV")->required();
  infer->add_option("--response", infer_args.response, "Response column name");
  infer->add_option("--out", infer_args.out, "Write JSON here instead of stdout");
  infer->add_option("--out-csv", infer_args.out_csv, "Per-variable results table");
  infer->add_option("--manifest", infer_args.manifest_out, "Also write the manifest here");
  infer->add_option("--alpha", infer_args.alpha, "Significance level")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  infer->add_option("--scheme", infer_args.scheme, "residual | wild | xyz | zclinear")
      ->check(CLI::IsMember({"residual", "wild", "xyz", "zclinear"}));
  infer->add_option("--multiplier", infer_args.multiplier,
                    "gaussian | rademacher | mammen")
      ->check(CLI::IsMember({"gaussian", "rademacher", "mammen"}));
  infer->add_option("--b", infer_args.b, "Bootstrap replicates")
      ->check(CLI::Range(1, 1000000000));
  infer->add_flag("--plain", infer_args.plain, "Plain (non-robust) studentization");
  infer->add_flag("--robust", [](std::int64_t) {},
                  "Robust studentization (default)");
  infer->add_flag("--wy", infer_args.wy, "Westfall-Young adjusted p-values");
  infer->add_option("--simultaneous", infer_args.simultaneous, "minmax | abs")
      ->check(CLI::IsMember({"minmax", "abs"}));
  infer->add_option("--group", infer_args.group,
                    "0-based predictor indices for a group test")
      ->delimiter(',');
  infer->add_option("--threads", infer_args.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  infer->add_option("--lambda-x", infer_args.lambda_x, "Nodewise penalty");
  infer_args.lambda.attach(infer);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Run a simulation scenario");
  sim->add_option("scenario", sim_args.scenario, "Scenario file (key = value)")
      ->required();
  sim->add_option("--experiment", sim_args.experiment, "coverage | multiple-testing")
      ->check(CLI::IsMember({"coverage", "multiple-testing"}));
  sim->add_option("--out", sim_args.out_prefix, "Output prefix (.json, .csv)");
  sim->add_option("--alpha", sim_args.alpha, "Significance level")
      ->check(CLI::Range(0.0, std::nextafter(1.0, 0.0)));
  sim->add_option("--scheme", sim_args.scheme, "residual | wild | xyz | zclinear")
      ->check(CLI::IsMember({"residual", "wild", "xyz", "zclinear"}));
  sim->add_option("--multiplier", sim_args.multiplier, "gaussian | rademacher | mammen")
      ->check(CLI::IsMember({"gaussian", "rademacher", "mammen"}));
  sim->add_option("--b", sim_args.b, "Bootstrap replicates")
      ->check(CLI::Range(1, 1000000000));
  sim->add_flag("--plain", sim_args.plain, "Plain (non-robust) studentization");
  sim->add_flag("--normal-baseline", sim_args.normal_baseline,
                "Also track normal-approximation coverage");
  sim->add_option("--lambda", sim_args.fixed_lambda, "Fixed penalty (default: CV)");
  sim->add_option("--lambda-x", sim_args.lambda_x, "Nodewise penalty");
  sim->add_option("--threads", sim_args.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  std::string rerun_path;
  auto* rerun = app.add_subcommand("rerun", "Replay a run from its manifest");
  rerun->add_option("manifest", rerun_path, "Manifest JSON")->required();

  // CLI11 parses reversed vectors.
  std::vector<std::string> parse_order(argv.rbegin(), argv.rend());
  parse_order.pop_back();  // program name
  try {
    app.parse(parse_order);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (fit->parsed()) return run_fit(fit_args, argv);
  if (infer->parsed()) return run_infer(infer_args, argv);
  if (sim->parsed()) return run_simulate(sim_args, argv);
  return run_rerun(rerun_path);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return dispatch(std::move(args));
  } catch (const hdboot::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
