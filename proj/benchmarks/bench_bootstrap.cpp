#include <benchmark/benchmark.h>

#include "hdboot/bootstrap.hpp"
#include "hdboot/nodewise.hpp"
#include "hdboot/simharness.hpp"

namespace {

struct Problem {
  hdboot::DesignMatrix X;
  hdboot::ResponseVector y;
  hdboot::LassoFit fit;
  hdboot::NodewiseProjection proj;
  hdboot::LassoWorkspace ws;
};

Problem make_problem(int n, int p) {
  hdboot::ScenarioConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.signal = hdboot::SignalKind::U02;
  hdboot::DesignMatrix X = hdboot::gen_design(cfg);
  hdboot::Vector beta = hdboot::gen_signal(cfg);
  hdboot::CounterRng rng(cfg.replication_seed, 0);
  hdboot::ResponseVector y(hdboot::gen_response(cfg, X.values(), beta, rng));
  hdboot::LassoWorkspace ws(X.values());
  const double lambda = 0.5 * hdboot::lambda_max(X, y);
  auto fit = hdboot::fit_lasso(X, y, lambda, {}, &ws);
  auto proj = hdboot::nodewise_residuals(X, hdboot::default_lambda_x(n, p),
                                         hdboot::all_targets(p), {}, &ws);
  return Problem{std::move(X), std::move(y), std::move(fit), std::move(proj),
                 std::move(ws)};
}

void bm_bootstrap(benchmark::State& state) {
  auto prob = make_problem(100, 100);
  hdboot::BootstrapSpec spec;
  spec.scheme = static_cast<hdboot::Scheme>(state.range(0));
  spec.B = 200;
  spec.seed = 11;
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto draws = hdboot::run_bootstrap(prob.X, prob.y, prob.fit, prob.proj, spec,
                                       threads, {}, {}, &prob.ws);
    benchmark::DoNotOptimize(draws.t_star);
  }
}

}  // namespace

BENCHMARK(bm_bootstrap)
    ->ArgsProduct({{0, 1, 3}, {1, 4}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
