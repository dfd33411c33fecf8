#include <benchmark/benchmark.h>

#include "hdboot/lasso.hpp"
#include "hdboot/rng.hpp"
#include "hdboot/simharness.hpp"

namespace {

hdboot::ScenarioConfig scenario(int n, int p) {
  hdboot::ScenarioConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.signal = hdboot::SignalKind::U02;
  return cfg;
}

void bm_lasso_fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const auto cfg = scenario(n, p);
  hdboot::DesignMatrix X = hdboot::gen_design(cfg);
  hdboot::Vector beta = hdboot::gen_signal(cfg);
  hdboot::CounterRng rng(cfg.replication_seed, 0);
  hdboot::ResponseVector y(hdboot::gen_response(cfg, X.values(), beta, rng));
  const double lambda = 0.5 * hdboot::lambda_max(X, y);
  hdboot::LassoWorkspace ws(X.values());
  for (auto _ : state) {
    auto fit = hdboot::fit_lasso(X, y, lambda, {}, &ws);
    benchmark::DoNotOptimize(fit.beta);
  }
}

void bm_lambda_cv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const auto cfg = scenario(n, p);
  hdboot::DesignMatrix X = hdboot::gen_design(cfg);
  hdboot::Vector beta = hdboot::gen_signal(cfg);
  hdboot::CounterRng rng(cfg.replication_seed, 0);
  hdboot::ResponseVector y(hdboot::gen_response(cfg, X.values(), beta, rng));
  const auto grid = hdboot::default_lambda_grid(X, y);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hdboot::select_lambda_cv(X, y, 10, grid, 7));
  }
}

}  // namespace

BENCHMARK(bm_lasso_fit)->Args({100, 100})->Args({200, 500})->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_lambda_cv)->Args({100, 100})->Unit(benchmark::kMillisecond);
