#include <benchmark/benchmark.h>

#include "pbgi/forward_model.hpp"
#include "pbgi/harness.hpp"
#include "pbgi/tv.hpp"

using namespace pbgi;

namespace {

ScanGeometry geometry_for(int m, int n, int q) {
  ScanGeometry g;
  g.m = m;
  g.n = n;
  g.q = q;
  return g;
}

void BM_GeneratePattern(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto pattern = generate_pattern(n, n, seed++);
    benchmark::DoNotOptimize(pattern.data.data());
  }
}
BENCHMARK(BM_GeneratePattern)->Arg(64)->Arg(128);

void BM_SimulateScan(benchmark::State& state) {
  const int n = 64, q = 64;
  const int m = static_cast<int>(state.range(0));
  const Scene scene = builtin_scene("blocks", n, q);
  const auto seq = generate_sequence(m, n, q, PatternMode::PerStrip, 1);
  const auto g = geometry_for(m, n, q);
  for (auto _ : state) {
    auto record = simulate_scan(scene, seq, g);
    benchmark::DoNotOptimize(record.frames.data());
  }
}
BENCHMARK(BM_SimulateScan)->Arg(16)->Arg(40)->Arg(64);

void BM_SystemApply(benchmark::State& state) {
  const int n = 64, q = 64;
  const int m = static_cast<int>(state.range(0));
  const Scene scene = builtin_scene("blocks", n, q);
  const auto seq = generate_sequence(m, n, q, PatternMode::PerStrip, 1);
  const auto system = assemble_system(simulate_scan(scene, seq, geometry_for(m, n, q)), seq);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(n * q, 0.5);
  for (auto _ : state) {
    auto y = system.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_SystemApply)->Arg(16)->Arg(64);

void BM_TvGradientStacked(benchmark::State& state) {
  const int n = 64, q = 64;
  const Eigen::VectorXd x = Eigen::VectorXd::Random(n * q);
  for (auto _ : state) {
    auto g = tv_gradient_stacked(x, n, q, 1e-8);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_TvGradientStacked);

}  // namespace
