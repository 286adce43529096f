#include <benchmark/benchmark.h>

#include "pdmp/examples.hpp"
#include "pdmp/flow.hpp"
#include "pdmp/measure.hpp"
#include "pdmp/simulate.hpp"

using namespace pdmp;

static void BM_ExprTreeEval(benchmark::State& state) {
  auto e = expr::parse("-x1 + 3/(1 + x2^2)", 2);
  std::vector<double> x{1.3, 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.evaluate(x));
    x[0] += 1e-9;
  }
}
BENCHMARK(BM_ExprTreeEval);

static void BM_ExprCompiledEval(benchmark::State& state) {
  auto e = expr::parse("-x1 + 3/(1 + x2^2)", 2);
  std::vector<double> x{1.3, 0.7};
  std::vector<double> stack(e.stack_need());
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.run(x, stack.data()));
    x[0] += 1e-9;
  }
}
BENCHMARK(BM_ExprCompiledEval);

static void BM_Rk4Step(benchmark::State& state) {
  auto ex = examples::radulescu(3.0);
  flow::Stepper stepper(ex.system);
  std::vector<double> x{2.0, 1.0};
  for (auto _ : state) {
    stepper.step(1, x, 1e-3);
    if (x[0] < 0.5) x = {2.0, 1.0};
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Rk4Step);

static void BM_EmbeddedStep(benchmark::State& state) {
  auto ex = examples::interval_beta(2.0);
  Rng rng(1);
  sim::State cur{{0.5}, 0};
  for (auto _ : state) {
    auto step = sim::embedded_step(ex.system, cur, rng, 1e-3);
    cur = step.state;
    benchmark::DoNotOptimize(cur.x[0]);
  }
}
BENCHMARK(BM_EmbeddedStep);

static void BM_ApplyKtilde(benchmark::State& state) {
  auto ex = examples::interval_beta(2.0);
  const measure::TestFn f = [](std::span<const double> x, int) { return x[0]; };
  std::vector<double> x{0.5};
  for (auto _ : state)
    benchmark::DoNotOptimize(measure::apply_ktilde(ex.system, f, x, 0, 32, 1e-2));
}
BENCHMARK(BM_ApplyKtilde);

BENCHMARK_MAIN();
