#include <benchmark/benchmark.h>

#include <cbfed/law.hpp>
#include <cbfed/regularization.hpp>
#include <cbfed/solver.hpp>
#include <cbfed/spectral.hpp>

namespace {

cbfed::SimConfig config(int n) {
  cbfed::SimConfig cfg;
  cfg.cutoff = n;
  cfg.grid = 3 * n;
  cfg.params.mu = 0.1;
  cfg.params.alpha = 1.0;
  cfg.params.beta = 1.0;
  cfg.params.r = 3.0;
  cfg.params.q = 2.0;
  cfg.T = 0.01;
  cfg.dt = 1e-3;
  return cfg;
}

void TransformRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto y = cbfed::random_field(2, n, 1);
  for (auto _ : state) {
    auto u = cbfed::to_physical(y, 6 * n);
    benchmark::DoNotOptimize(cbfed::to_spectral(u, n));
  }
}
BENCHMARK(TransformRoundTrip)->Arg(8)->Arg(16)->Arg(32);

void NonlinearRhs(benchmark::State& state) {
  const cbfed::GalerkinSolver solver(config(static_cast<int>(state.range(0))));
  const auto y = solver.initial_state();
  for (auto _ : state) benchmark::DoNotOptimize(solver.nonlinear_rhs(y, 0.0));
}
BENCHMARK(NonlinearRhs)->Arg(8)->Arg(16)->Arg(32);

void Step(benchmark::State& state) {
  const cbfed::GalerkinSolver solver(config(static_cast<int>(state.range(0))));
  auto y = solver.initial_state();
  for (auto _ : state) {
    y = solver.step(y, 0.0, 1e-3);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(Step)->Arg(8)->Arg(16);

void Mollify(benchmark::State& state) {
  const auto law = cbfed::zigzag_example();
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cbfed::mollify(law, eps));
}
BENCHMARK(Mollify)->Arg(5)->Arg(10)->Arg(20);

void RegularizedEval(benchmark::State& state) {
  const auto law = cbfed::mollify(cbfed::zigzag_example(), 0.1);
  double xi = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize((*law)(xi));
    xi = xi > 4.0 ? -4.0 : xi + 1e-3;
  }
}
BENCHMARK(RegularizedEval);

}  // namespace

BENCHMARK_MAIN();
