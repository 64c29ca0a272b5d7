#include <benchmark/benchmark.h>

#include "potmap/cli/expression.hpp"

using potmap::Vector;
using namespace potmap::cli;

static void BM_Parse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_expression("-x2 / sqrt(x1^2 + x2^2) + exp(-0.1 * t1) * sin(x1 * x2)"));
}
BENCHMARK(BM_Parse);

static void BM_Evaluate(benchmark::State& state) {
  const Expression e = parse_expression("-x2 / sqrt(x1^2 + x2^2) + exp(-0.1 * t1) * sin(x1 * x2)");
  Vector t(1), x(2);
  t << 0.4;
  x << 0.9, -1.2;
  for (auto _ : state) benchmark::DoNotOptimize(e.evaluate(t, x));
}
BENCHMARK(BM_Evaluate);

static void BM_Derivative(benchmark::State& state) {
  const Expression e = parse_expression("-x2 / sqrt(x1^2 + x2^2) + exp(-0.1 * t1) * sin(x1 * x2)");
  for (auto _ : state) benchmark::DoNotOptimize(e.derivative({VarKind::X, 0}));
}
BENCHMARK(BM_Derivative);

BENCHMARK_MAIN();
