#include <benchmark/benchmark.h>

#include "pbgi/harness.hpp"
#include "pbgi/solver.hpp"

using namespace pbgi;

namespace {

ScanGeometry geometry_for(int m, int n, int q) {
  ScanGeometry g;
  g.m = m;
  g.n = n;
  g.q = q;
  return g;
}

MeasurementSystem make_system(int n, int q, double eta, PatternMode mode) {
  const int m = rows_for_eta(eta, n);
  const Scene scene = builtin_scene("blocks", n, q);
  const auto seq = generate_sequence(m, n, q, mode, 1);
  return assemble_system(simulate_scan(scene, seq, geometry_for(m, n, q)), seq);
}

void BM_SolveFixedIterations(benchmark::State& state) {
  const auto system = make_system(32, 32, 0.5, PatternMode::PerStrip);
  SolverConfig config;
  config.max_iters = static_cast<int>(state.range(0));
  config.rel_tol = 0.0;  // run the full budget
  for (auto _ : state) {
    auto result = solve_per_strip(system, config);
    benchmark::DoNotOptimize(result.estimate.data());
  }
}
BENCHMARK(BM_SolveFixedIterations)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ObjectiveGradient(benchmark::State& state) {
  const auto system = make_system(64, 64, 0.625, PatternMode::PerStrip);
  SolverConfig config;
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(64 * 64, 0.5);
  for (auto _ : state) {
    auto g = objective_gradient(system, x, config);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_ObjectiveGradient);

}  // namespace

BENCHMARK_MAIN();
