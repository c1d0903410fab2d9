#include "problems.hpp"

#include <tilq/equilibrium.hpp>
#include <tilq/propagators.hpp>
#include <tilq/riccati.hpp>

#include <benchmark/benchmark.h>

using namespace tilq;

namespace {

void BM_SolveHyperbolic(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int N = static_cast<int>(state.range(1));
    const LQProblem p = fixtures::hyperbolic(n, 1.0, 1.0);
    const auto g = TimeGrid::uniform(p.T, N);
    for (auto _ : state) benchmark::DoNotOptimize(solve_riccati(p, g));
}
BENCHMARK(BM_SolveHyperbolic)
    ->ArgsProduct({{1, 2}, {100, 200, 400}})
    ->Unit(benchmark::kMillisecond);

void BM_SolveTimeConsistent(benchmark::State& state) {
    const LQProblem p = fixtures::scalar_tanh();
    const auto g = TimeGrid::uniform(p.T, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_riccati(p, g));
}
BENCHMARK(BM_SolveTimeConsistent)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_NonlocalTerm(benchmark::State& state) {
    const LQProblem p = fixtures::hyperbolic(2, 2.0, 1.0);
    const auto P = solve_riccati(p, TimeGrid::uniform(p.T, static_cast<int>(state.range(0))));
    const auto phi = closed_loop_propagator(p, P, Anchor::end);
    for (auto _ : state) benchmark::DoNotOptimize(f_map(p, P, phi, 0.3, 0.1));
}
BENCHMARK(BM_NonlocalTerm)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_NonlocalDiagonal(benchmark::State& state) {
    const LQProblem p = fixtures::hyperbolic(2, 2.0, 1.0);
    const auto P = solve_riccati(p, TimeGrid::uniform(p.T, static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(nonlocal_diagonal(p, P));
}
BENCHMARK(BM_NonlocalDiagonal)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FundamentalSolution(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix C = fixtures::mat(2, 2, {0.0, 1.0, -1.0, 0.1}).replicate(n / 2, n / 2);
    const auto g = TimeGrid::uniform(1.0, 400);
    for (auto _ : state) benchmark::DoNotOptimize(fundamental_solution([&C](double) { return C; }, n, g));
}
BENCHMARK(BM_FundamentalSolution)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_Certificate(benchmark::State& state) {
    const LQProblem p = fixtures::hyperbolic(2, 1.0, 1.0);
    const auto P = solve_riccati(p, TimeGrid::uniform(p.T, 400));
    const auto pol = build_policy(p, P);
    SampleSpec spec;
    spec.t_count = 2;
    for (auto _ : state) benchmark::DoNotOptimize(equilibrium_certificate(p, pol, spec));
}
BENCHMARK(BM_Certificate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
