#include "hdboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>

#include "hdboot/detail/parallel.hpp"
#include "hdboot/stats.hpp"

namespace hdboot {

Vector draw_residual(CounterRng& rng, const Vector& eps_cent) {
  const auto n = eps_cent.size();
  if (n > 0 && std::fabs(eps_cent.sum() / static_cast<double>(n)) > 1e-10) {
    throw ConfigError("draw_residual expects centered residuals");
  }
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = eps_cent[static_cast<Eigen::Index>(
        rng.uniform_index(static_cast<std::uint64_t>(n)))];
  }
  return out;
}

Vector draw_wild(CounterRng& rng, const Vector& eps_cent, Multiplier multiplier) {
  const auto n = eps_cent.size();
  Vector out(n);
  switch (multiplier) {
    case Multiplier::Gaussian:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.normal() * eps_cent[i];
      break;
    case Multiplier::Rademacher:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.rademacher() * eps_cent[i];
      break;
    case Multiplier::MammenTwoPoint: {
      // Two-point law with EW = 0, EW^2 = 1, EW^3 = 1.
      const double sqrt5 = std::sqrt(5.0);
      const double w_hi = (1.0 + sqrt5) / 2.0;
      const double w_lo = (1.0 - sqrt5) / 2.0;
      const double p_hi = (sqrt5 - 1.0) / (2.0 * sqrt5);
      for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = (rng.bernoulli(p_hi) ? w_hi : w_lo) * eps_cent[i];
      }
      break;
    }
  }
  return out;
}

XyzFrame make_xyz_frame(const DesignMatrix& X, const NodewiseProjection& proj,
                        const LassoFit& fit) {
  const Vector eps = fit.residuals;
  Vector eps_cent = eps.array() - eps.mean();
  const double e2 = eps_cent.squaredNorm();
  if (e2 == 0.0) {
    throw DegenerateVariance("xyz frame undefined for zero residuals");
  }
  XyzFrame frame;
  frame.X = X.values();
  for (Eigen::Index j = 0; j < frame.X.cols(); ++j) {
    frame.X.col(j) -= (frame.X.col(j).dot(eps_cent) / e2) * eps_cent;
  }
  frame.Z = proj.Z;
  for (Eigen::Index t = 0; t < frame.Z.cols(); ++t) {
    frame.Z.col(t) -= (frame.Z.col(t).dot(eps_cent) / e2) * eps_cent;
  }
  frame.Y = frame.X * fit.beta + eps_cent;
  frame.Y_null = eps_cent;

  // Orthogonality is an exact identity; flag any numerical violation.
  const double scale = 1e-8 * std::sqrt(e2);
  for (Eigen::Index j = 0; j < frame.X.cols(); ++j) {
    if (std::fabs(frame.X.col(j).dot(eps_cent)) >
        scale * frame.X.col(j).norm() + 1e-12) {
      throw Error(ErrorKind::Numerical, "xyz_orthogonality",
                  "xyz frame column not orthogonal to centered residuals");
    }
  }
  return frame;
}

namespace {

struct SeContext {
  double abs_zx;
  double z_norm;  // ||Z_j||_2
};

// Plug-in standard error from a residual vector and sparsity count.
double plug_in_se(Studentization mode, const Vector& resid,
                  const Eigen::Ref<const Vector>& zcol, const SeContext& ctx,
                  int n, int s_hat, SigmaDenominator omega_denom) {
  const double df = (omega_denom == SigmaDenominator::DfAdjusted)
                        ? static_cast<double>(n - s_hat)
                        : static_cast<double>(n);
  if (mode == Studentization::Plain) {
    if (s_hat >= n) throw SaturatedFit("bootstrap refit saturated");
    const double sigma2 = resid.squaredNorm() / static_cast<double>(n - s_hat);
    return std::sqrt(sigma2) * ctx.z_norm / ctx.abs_zx;
  }
  if (df <= 0.0) throw SaturatedFit("bootstrap refit saturated");
  const Vector prod = resid.cwiseProduct(zcol);
  const double mean = prod.mean();
  const double omega2 = (prod.array() - mean).square().sum() / df;
  return std::sqrt(static_cast<double>(n) * omega2) / ctx.abs_zx;
}

}  // namespace

BootstrapDraws run_bootstrap(const DesignMatrix& X, const ResponseVector& y,
                             const LassoFit& fit, const NodewiseProjection& proj,
                             const BootstrapSpec& spec, int threads,
                             const SolverOptions& solver_options,
                             const DesparsOptions& despars_options,
                             const LassoWorkspace* workspace) {
  check_paired(X, y);
  if (spec.B < 1) throw ConfigError("bootstrap needs B >= 1");
  const int n = X.n();
  const auto m = static_cast<Eigen::Index>(proj.targets.size());
  if (proj.Z.rows() != n) {
    throw DimensionMismatch("projection and design disagree on n");
  }

  BootstrapDraws draws;
  draws.spec = spec;
  draws.targets = proj.targets;
  if (spec.B < 100) {
    draws.warnings.push_back("B = " + std::to_string(spec.B) +
                             " is below the recommended minimum of 100");
  }

  Vector eps_cent = fit.residuals.array() - fit.residuals.mean();
  if (eps_cent.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateVariance("all centered residuals are zero");
  }

  const bool at_estimate = spec.center == Center::AtEstimate;
  const Vector Xb = X.values() * fit.beta;

  std::vector<SeContext> se_ctx(proj.targets.size());
  for (Eigen::Index t = 0; t < m; ++t) {
    se_ctx[static_cast<std::size_t>(t)] = {std::fabs(proj.zx_inner[t]),
                                           std::sqrt(proj.z_norm2[t])};
  }

  std::optional<LassoWorkspace> local_ws;
  const LassoWorkspace* ws = workspace;
  const bool refits_original_design =
      spec.scheme == Scheme::Residual || spec.scheme == Scheme::Wild;
  if (refits_original_design && !ws) {
    local_ws.emplace(X.values());
    ws = &*local_ws;
  }

  std::optional<XyzFrame> frame;
  if (spec.scheme == Scheme::XYZPaired) {
    frame = make_xyz_frame(X, proj, fit);
  }

  draws.t_star.resize(spec.B, m);
  std::vector<char> failed(static_cast<std::size_t>(spec.B), 0);
  std::vector<std::string> failure_notes(static_cast<std::size_t>(spec.B));

  auto replicate = [&](int b) {
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(b));
    try {
      if (spec.scheme == Scheme::ZCLinear) {
        // Linear-part-only statistic: no refit, the bias-correction term
        // is not re-estimated.
        const Vector eps_star = draw_wild(rng, eps_cent, spec.multiplier);
        for (Eigen::Index t = 0; t < m; ++t) {
          const auto& ctx = se_ctx[static_cast<std::size_t>(t)];
          const double se =
              plug_in_se(spec.studentization, eps_star, proj.Z.col(t), ctx, n,
                         fit.s_hat, despars_options.omega_denominator);
          if (!(se > 0.0)) throw DegenerateVariance("zero bootstrap se");
          const double linear = proj.Z.col(t).dot(eps_star) / proj.zx_inner[t];
          const double sign = proj.zx_inner[t] < 0.0 ? -1.0 : 1.0;
          draws.t_star(b, t) = sign * linear / se;
        }
        return;
      }

      if (spec.scheme == Scheme::XYZPaired) {
        Matrix Xs(n, X.p());
        Matrix Zs(n, m);
        Vector Ys(n);
        const Vector& Ysrc = at_estimate ? frame->Y : frame->Y_null;
        for (int i = 0; i < n; ++i) {
          const auto r = static_cast<Eigen::Index>(
              rng.uniform_index(static_cast<std::uint64_t>(n)));
          Xs.row(i) = frame->X.row(r);
          Zs.row(i) = frame->Z.row(r);
          Ys[i] = Ysrc[r];
        }
        DesignMatrix Xd(std::move(Xs));
        ResponseVector yd(std::move(Ys));
        LassoFit refit = fit_lasso(Xd, yd, fit.lambda, solver_options, nullptr,
                                   at_estimate ? &fit.beta : nullptr);
        const Vector& resid = refit.residuals;
        for (Eigen::Index t = 0; t < m; ++t) {
          const int j = proj.targets[static_cast<std::size_t>(t)];
          const double zx = Zs.col(t).dot(Xd.values().col(j));
          if (std::fabs(zx) <= 1e-12 * static_cast<double>(n)) {
            throw DegenerateProjection("resampled Z_j^T X_j vanished");
          }
          const SeContext ctx{std::fabs(zx), Zs.col(t).norm()};
          const double se =
              plug_in_se(spec.studentization, resid, Zs.col(t), ctx, n,
                         refit.s_hat, despars_options.omega_denominator);
          if (!(se > 0.0)) throw DegenerateVariance("zero bootstrap se");
          const double b_star = refit.beta[j] + Zs.col(t).dot(resid) / zx;
          const double center_val = at_estimate ? fit.beta[j] : 0.0;
          const double sign = zx < 0.0 ? -1.0 : 1.0;
          draws.t_star(b, t) = sign * (b_star - center_val) / se;
        }
        return;
      }

      // Residual or Wild: fixed design, Z columns reused.
      Vector eps_star = (spec.scheme == Scheme::Residual)
                            ? draw_residual(rng, eps_cent)
                            : draw_wild(rng, eps_cent, spec.multiplier);
      Vector y_star = at_estimate ? Vector(Xb + eps_star) : std::move(eps_star);
      ResponseVector yd(std::move(y_star));
      DesignMatrix const& Xd = X;
      LassoFit refit = fit_lasso(Xd, yd, fit.lambda, solver_options, ws,
                                 at_estimate ? &fit.beta : nullptr);
      const Vector& resid = refit.residuals;
      if (resid.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateVariance("zero bootstrap residuals");
      }
      for (Eigen::Index t = 0; t < m; ++t) {
        const int j = proj.targets[static_cast<std::size_t>(t)];
        const auto& ctx = se_ctx[static_cast<std::size_t>(t)];
        const double se =
            plug_in_se(spec.studentization, resid, proj.Z.col(t), ctx, n,
                       refit.s_hat, despars_options.omega_denominator);
        if (!(se > 0.0)) throw DegenerateVariance("zero bootstrap se");
        const double b_star = refit.beta[j] + proj.Z.col(t).dot(resid) / proj.zx_inner[t];
        const double center_val = at_estimate ? fit.beta[j] : 0.0;
        const double sign = proj.zx_inner[t] < 0.0 ? -1.0 : 1.0;
        draws.t_star(b, t) = sign * (b_star - center_val) / se;
      }
    } catch (const Error& e) {
      failed[static_cast<std::size_t>(b)] = 1;
      failure_notes[static_cast<std::size_t>(b)] = e.what();
    }
  };

  detail::parallel_for(spec.B, threads, replicate);

  draws.failures = static_cast<int>(
      std::count(failed.begin(), failed.end(), static_cast<char>(1)));
  if (draws.failures > 0) {
    if (static_cast<double>(draws.failures) > 0.01 * spec.B) {
      std::string note;
      for (int b = 0; b < spec.B; ++b) {
        if (failed[static_cast<std::size_t>(b)]) {
          note = failure_notes[static_cast<std::size_t>(b)];
          break;
        }
      }
      throw ReplicateFailure(std::to_string(draws.failures) + " of " +
                             std::to_string(spec.B) +
                             " bootstrap replicates failed (first: " + note + ")");
    }
    // Drop failed rows, preserving order.
    decltype(draws.t_star) compact(spec.B - draws.failures, m);
    int row = 0;
    for (int b = 0; b < spec.B; ++b) {
      if (!failed[static_cast<std::size_t>(b)]) {
        compact.row(row++) = draws.t_star.row(b);
      }
    }
    draws.t_star = std::move(compact);
    draws.warnings.push_back(std::to_string(draws.failures) +
                             " replicates failed and were dropped");
  }
  return draws;
}

namespace {

std::vector<double> sorted_column(const BootstrapDraws& draws, Eigen::Index t) {
  std::vector<double> col(static_cast<std::size_t>(draws.t_star.rows()));
  for (Eigen::Index b = 0; b < draws.t_star.rows(); ++b) {
    col[static_cast<std::size_t>(b)] = draws.t_star(b, t);
  }
  std::sort(col.begin(), col.end());
  return col;
}

IndexSet resolve_cols(const BootstrapDraws& draws, const IndexSet& cols) {
  if (cols.empty()) {
    IndexSet all(static_cast<std::size_t>(draws.width()));
    for (int i = 0; i < draws.width(); ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  for (int c : cols) {
    if (c < 0 || c >= draws.width()) {
      throw ConfigError("group column " + std::to_string(c) + " out of range");
    }
  }
  return cols;
}

}  // namespace

CiTable individual_ci(const BootstrapDraws& draws, const DesparsResult& res,
                      double alpha) {
  if (draws.spec.center != Center::AtEstimate) {
    throw ConfigError("individual_ci requires draws centered at the estimate");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (draws.width() != res.b_hat.size()) {
    throw DimensionMismatch("draws and despars result disagree on targets");
  }
  const double B = static_cast<double>(draws.B());
  CiTable table;
  table.targets = draws.targets;
  if (B * std::min(alpha / 2.0, 1.0 - alpha / 2.0) < 5.0) {
    table.warnings.push_back("tail quantiles poorly estimable at B = " +
                             std::to_string(draws.B()));
  }
  const Vector& se = res.se(draws.spec.studentization);
  const auto m = res.b_hat.size();
  table.lower.resize(m);
  table.upper.resize(m);
  table.p_values.resize(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto col = sorted_column(draws, t);
    const double b = res.b_hat[t];
    const double s = se[t];
    table.lower[t] = b - quantile_sorted(col, 1.0 - alpha / 2.0) * s;
    table.upper[t] = b - quantile_sorted(col, alpha / 2.0) * s;

    // Smallest alpha at which zero leaves the interval (monotone in alpha).
    const auto excludes_zero = [&](double a) {
      const double lo = b - quantile_sorted(col, 1.0 - a / 2.0) * s;
      const double hi = b - quantile_sorted(col, a / 2.0) * s;
      return lo > 0.0 || hi < 0.0;
    };
    double p;
    if (!excludes_zero(1.0 - 1e-12)) {
      p = 1.0;
    } else if (excludes_zero(1e-12)) {
      p = 0.0;
    } else {
      double lo = 1e-12, hi = 1.0 - 1e-12;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excludes_zero(mid) ? hi : lo) = mid;
      }
      p = hi;
    }
    table.p_values[t] = std::min(1.0, std::max(p, 1.0 / B));
  }
  return table;
}

SimultaneousCi simultaneous_ci(const BootstrapDraws& draws,
                               const DesparsResult& res, double alpha,
                               SimultaneousVariant variant, const IndexSet& cols) {
  if (draws.spec.center != Center::AtEstimate) {
    throw ConfigError("simultaneous_ci requires draws centered at the estimate");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const IndexSet group = resolve_cols(draws, cols);
  const auto rows = draws.t_star.rows();
  std::vector<double> row_max(static_cast<std::size_t>(rows)),
      row_min(static_cast<std::size_t>(rows)), row_abs(static_cast<std::size_t>(rows));
  for (Eigen::Index b = 0; b < rows; ++b) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int c : group) {
      const double v = draws.t_star(b, c);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    row_max[static_cast<std::size_t>(b)] = mx;
    row_min[static_cast<std::size_t>(b)] = mn;
    row_abs[static_cast<std::size_t>(b)] = std::max(std::fabs(mx), std::fabs(mn));
  }
  SimultaneousCi out;
  if (variant == SimultaneousVariant::MinMax) {
    out.q_upper = quantile(std::move(row_max), 1.0 - alpha / 2.0);
    out.q_lower = quantile(std::move(row_min), alpha / 2.0);
  } else {
    const double q_abs = quantile(std::move(row_abs), 1.0 - alpha);
    out.q_upper = q_abs;
    out.q_lower = -q_abs;
  }
  const Vector& se = res.se(draws.spec.studentization);
  out.targets.reserve(group.size());
  out.lower.resize(static_cast<Eigen::Index>(group.size()));
  out.upper.resize(static_cast<Eigen::Index>(group.size()));
  for (std::size_t i = 0; i < group.size(); ++i) {
    const int c = group[i];
    out.targets.push_back(draws.targets[static_cast<std::size_t>(c)]);
    out.lower[static_cast<Eigen::Index>(i)] = res.b_hat[c] - out.q_upper * se[c];
    out.upper[static_cast<Eigen::Index>(i)] = res.b_hat[c] - out.q_lower * se[c];
  }
  return out;
}

double group_pvalue(const BootstrapDraws& draws_null, const Vector& observed_t,
                    const IndexSet& cols) {
  if (draws_null.spec.center != Center::CompleteNull) {
    throw ConfigError("group_pvalue requires complete-null draws");
  }
  if (observed_t.size() != draws_null.width()) {
    throw DimensionMismatch("observed statistics do not align with draws columns");
  }
  const IndexSet group = resolve_cols(draws_null, cols);
  double obs = 0.0;
  for (int c : group) obs = std::max(obs, std::fabs(observed_t[c]));
  const auto rows = draws_null.t_star.rows();
  int count = 0;
  for (Eigen::Index b = 0; b < rows; ++b) {
    double mx = 0.0;
    for (int c : group) mx = std::max(mx, std::fabs(draws_null.t_star(b, c)));
    if (mx > obs) ++count;
  }
  const double B = static_cast<double>(rows);
  return std::max(static_cast<double>(count) / B, 1.0 / B);
}

WestfallYoungResult westfall_young(const BootstrapDraws& draws_null,
                                   const Vector& observed_t, double alpha) {
  if (draws_null.spec.center != Center::CompleteNull) {
    throw ConfigError("westfall_young requires complete-null draws");
  }
  if (observed_t.size() != draws_null.width()) {
    throw DimensionMismatch("observed statistics do not align with draws columns");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const auto rows = draws_null.t_star.rows();
  WestfallYoungResult out;
  out.null_max_abs.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index b = 0; b < rows; ++b) {
    out.null_max_abs[static_cast<std::size_t>(b)] =
        draws_null.t_star.row(b).cwiseAbs().maxCoeff();
  }
  const double B = static_cast<double>(rows);
  out.adjusted.resize(observed_t.size());
  std::vector<double> sorted_max = out.null_max_abs;
  std::sort(sorted_max.begin(), sorted_max.end());
  for (Eigen::Index j = 0; j < observed_t.size(); ++j) {
    const double tj = std::fabs(observed_t[j]);
    // count of rows with max > |t_j|
    const auto it = std::upper_bound(sorted_max.begin(), sorted_max.end(), tj);
    const auto count = static_cast<double>(sorted_max.end() - it);
    out.adjusted[j] = std::max(count / B, 1.0 / B);
  }
  out.t_rej = quantile_sorted(sorted_max, 1.0 - alpha);
  return out;
}

// --- serialization ---

namespace {
constexpr char kMagic[8] = {'H', 'D', 'B', 'D', '0', '0', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void save_draws_binary(const BootstrapDraws& draws, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::int64_t>(out, draws.t_star.rows());
  write_pod<std::int64_t>(out, draws.t_star.cols());
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(draws.spec.scheme));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(draws.spec.multiplier));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(draws.spec.studentization));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(draws.spec.center));
  write_pod<std::int64_t>(out, draws.spec.B);
  write_pod<std::uint64_t>(out, draws.spec.seed);
  write_pod<std::int64_t>(out, draws.failures);
  for (int j : draws.targets) write_pod<std::int64_t>(out, j);
  out.write(reinterpret_cast<const char*>(draws.t_star.data()),
            static_cast<std::streamsize>(sizeof(double) *
                                         static_cast<std::size_t>(draws.t_star.size())));
  if (!out) throw ParseError("write failure on " + path);
}

BootstrapDraws load_draws_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(path + " is not a draws cache file");
  }
  const auto rows = read_pod<std::int64_t>(in);
  const auto cols = read_pod<std::int64_t>(in);
  BootstrapDraws draws;
  draws.spec.scheme = static_cast<Scheme>(read_pod<std::uint8_t>(in));
  draws.spec.multiplier = static_cast<Multiplier>(read_pod<std::uint8_t>(in));
  draws.spec.studentization = static_cast<Studentization>(read_pod<std::uint8_t>(in));
  draws.spec.center = static_cast<Center>(read_pod<std::uint8_t>(in));
  draws.spec.B = static_cast<int>(read_pod<std::int64_t>(in));
  draws.spec.seed = read_pod<std::uint64_t>(in);
  draws.failures = static_cast<int>(read_pod<std::int64_t>(in));
  draws.targets.resize(static_cast<std::size_t>(cols));
  for (auto& j : draws.targets) j = static_cast<int>(read_pod<std::int64_t>(in));
  draws.t_star.resize(rows, cols);
  in.read(reinterpret_cast<char*>(draws.t_star.data()),
          static_cast<std::streamsize>(sizeof(double) *
                                       static_cast<std::size_t>(rows * cols)));
  if (!in) throw ParseError("truncated draws cache file " + path);
  return draws;
}

void save_draws_csv(const BootstrapDraws& draws, std::ostream& out) {
  out << "replicate";
  for (int j : draws.targets) out << ",t_" << j;
  out << "\n";
  out.precision(17);
  for (Eigen::Index b = 0; b < draws.t_star.rows(); ++b) {
    out << b;
    for (Eigen::Index t = 0; t < draws.t_star.cols(); ++t) {
      out << "," << draws.t_star(b, t);
    }
    out << "\n";
  }
}

}  // namespace hdboot
