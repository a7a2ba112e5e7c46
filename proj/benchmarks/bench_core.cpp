#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "sslab/conditions.hpp"
#include "sslab/fit.hpp"
#include "sslab/geometry.hpp"
#include "sslab/heat.hpp"
#include "sslab/measure.hpp"
#include "sslab/network.hpp"
#include "sslab/scaling.hpp"
#include "sslab/words.hpp"

using namespace sslab;

namespace {

std::shared_ptr<const FractalSystem> sg() {
  static const auto s = std::make_shared<const FractalSystem>(build_system(SystemKind::Sierpinski));
  return s;
}

std::shared_ptr<const FractalSystem> k14() {
  static const auto s = std::make_shared<const FractalSystem>(build_system(SystemKind::KLambda, {.lambda = 0.25}));
  return s;
}

std::shared_ptr<const SelfSimilarMeasure> uniform_sg() {
  return std::make_shared<const SelfSimilarMeasure>(Tuple{1.0 / 3, 1.0 / 3, 1.0 / 3}, sg());
}

}  // namespace

static void BM_Partition(benchmark::State& state) {
  const Tuple theta{0.25, 0.25, 0.25, 0.5};
  const double r = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  std::size_t words = 0;
  for (auto _ : state) {
    auto p = partition(theta, r);
    words = p.size();
    benchmark::DoNotOptimize(p);
  }
  state.counters["words"] = static_cast<double>(words);
}
BENCHMARK(BM_Partition)->DenseRange(6, 14, 4)->Unit(benchmark::kMicrosecond);

static void BM_BuildNetworkK(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tuple r{0.65, 0.65, 0.65, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(build_network(*k14(), r, n));
}
BENCHMARK(BM_BuildNetworkK)->DenseRange(3, 7, 2)->Unit(benchmark::kMillisecond);

static void BM_CornerResistanceSG(benchmark::State& state) {
  const auto net = build_network(*sg(), Tuple{0.6, 0.6, 0.6}, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(corner_resistance(net));
  state.counters["vertices"] = static_cast<double>(net.size());
}
BENCHMARK(BM_CornerResistanceSG)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_SolveB(benchmark::State& state) {
  const auto level = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_b(*k14(), 0.5, level));
}
BENCHMARK(BM_SolveB)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_CheckAV(benchmark::State& state) {
  const Tuple zeta{0.3, 0.3, 0.3, 0.1};
  const auto res = dyadic_ladder(3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_av(*k14(), k14()->ratios, zeta, res));
}
BENCHMARK(BM_CheckAV)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_BallVolume(benchmark::State& state) {
  const SelfSimilarMeasure mu(Tuple{0.3, 0.3, 0.3, 0.1}, k14());
  const Vec2 x = level_vertices(*k14(), 3)[7];
  const double r = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ball_volume(mu, x, r));
}
BENCHMARK(BM_BallVolume)->DenseRange(2, 10, 4)->Unit(benchmark::kMicrosecond);

// Dense eigendecomposition dominates; the level sets the vertex count.
static void BM_HeatSemigroupSG(benchmark::State& state) {
  const auto net = build_network(*sg(), Tuple{0.6, 0.6, 0.6}, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    HeatSemigroup hs(net, uniform_sg());
    benchmark::DoNotOptimize(hs.kernel(0.01, 0, 1));
  }
  state.counters["vertices"] = static_cast<double>(net.size());
}
BENCHMARK(BM_HeatSemigroupSG)->DenseRange(4, 6, 1)->Unit(benchmark::kMillisecond);

static void BM_KernelRow(benchmark::State& state) {
  const HeatSemigroup hs(build_network(*sg(), Tuple{0.6, 0.6, 0.6}, 6), uniform_sg());
  hs.kernel(0.01, 0, 0);
  std::size_t x = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hs.kernel_row(0.01, x++ % hs.size()));
}
BENCHMARK(BM_KernelRow)->Unit(benchmark::kMicrosecond);

static void BM_KrylovKernelRow(benchmark::State& state) {
  const HeatSemigroup hs(build_network(*sg(), Tuple{0.6, 0.6, 0.6}, 6), uniform_sg(), {.dense_cap = 0});
  std::size_t x = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hs.kernel_row(0.01, x++ % hs.size()));
}
BENCHMARK(BM_KrylovKernelRow)->Unit(benchmark::kMillisecond);

static void BM_MinimaxChain(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScalingFunction w(sg()->ratios, Tuple{0.2, 0.2, 0.2}, sg()->diameter, sg());
  const auto g = build_network(*sg(), sg()->ratios, n);
  for (auto _ : state)
    benchmark::DoNotOptimize(minimax_chain_cost(g, *sg(), w, g.corners[0], g.corners[1], std::size_t{2} << n));
}
BENCHMARK(BM_MinimaxChain)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
