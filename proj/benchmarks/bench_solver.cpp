#include <benchmark/benchmark.h>

#include "nmpg/problems.hpp"
#include "nmpg/solver.hpp"

namespace {

void solve_lasso(benchmark::State& state, const nmpg::SolverParams& params) {
  nmpg::ProblemSpec spec{nmpg::ProblemKind::LassoGeneral};
  spec.dim = static_cast<std::size_t>(state.range(0));
  const nmpg::CompositeProblem p = nmpg::make_problem(spec);
  const nmpg::Vector x0 = nmpg::Vector::Zero(state.range(0));
  std::size_t iterations = 0;
  for (auto _ : state) {
    const nmpg::RunResult r = nmpg::solve(p, params, x0);
    iterations = r.trace.size();
    benchmark::DoNotOptimize(r.x_final.data());
  }
  state.counters["outer_iters"] = static_cast<double>(iterations);
}

void BM_LassoMonotone(benchmark::State& state) {
  solve_lasso(state, nmpg::monotone(nmpg::SolverParams{}));
}
BENCHMARK(BM_LassoMonotone)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_LassoMeanRule(benchmark::State& state) { solve_lasso(state, nmpg::SolverParams{}); }
BENCHMARK(BM_LassoMeanRule)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_LassoMaxRule(benchmark::State& state) {
  nmpg::SolverParams params;
  params.reference = nmpg::MaxReference{10};
  solve_lasso(state, params);
}
BENCHMARK(BM_LassoMaxRule)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_QuarticTail(benchmark::State& state) {
  const nmpg::CompositeProblem p = nmpg::make_quartic_scalar();
  nmpg::SolverParams params;
  params.epsilon = 0.0;
  params.max_outer_iters = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nmpg::solve(p, params, nmpg::Vector::Constant(1, 1.0)).x_final.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuarticTail)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
