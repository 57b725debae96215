#include <benchmark/benchmark.h>

#include "newtonflow/adaptive.hpp"
#include "newtonflow/basin.hpp"
#include "newtonflow/classical.hpp"
#include "newtonflow/linalg.hpp"
#include "newtonflow/problems.hpp"

namespace {

using namespace newtonflow;

void BM_LuSolve2x2(benchmark::State& state) {
  const Matrix a{{3.0, -1.0}, {2.0, 5.0}};
  const Vector b{1.0, -2.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear(a, b));
}
BENCHMARK(BM_LuSolve2x2);

void BM_AdaptiveSolve(benchmark::State& state) {
  const ProblemDef& problem = builtin_problem(static_cast<BuiltinId>(state.range(0)));
  const Vector x0{0.7, -0.4};
  for (auto _ : state) benchmark::DoNotOptimize(solve_adaptive(problem, Preconditioner::newton_inverse(), x0));
}
BENCHMARK(BM_AdaptiveSolve)->DenseRange(0, 2);

void BM_FixedStepSolve(benchmark::State& state) {
  const ProblemDef& problem = builtin_problem(static_cast<BuiltinId>(state.range(0)));
  const Vector x0{0.7, -0.4};
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_step(problem, Preconditioner::newton_inverse(), x0, 1.0));
}
BENCHMARK(BM_FixedStepSolve)->DenseRange(0, 2);

void BM_AttractorOracle(benchmark::State& state) {
  const ProblemDef& problem = builtin_problem(BuiltinId::Cubic);
  const Vector x0{0.7, -0.4};
  for (auto _ : state) benchmark::DoNotOptimize(attractor_oracle(problem, x0, OracleConfig{}));
}
BENCHMARK(BM_AttractorOracle)->Unit(benchmark::kMillisecond);

// Two grid rows across the full width of the domain.
void BM_BasinRows(benchmark::State& state) {
  const ProblemDef& problem = builtin_problem(BuiltinId::Cubic);
  const GridSpec grid{problem.domain(), static_cast<std::size_t>(state.range(0)), 2};
  for (auto _ : state) benchmark::DoNotOptimize(sample_grid(problem, SolverSpec::adaptive(), grid));
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_BasinRows)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
