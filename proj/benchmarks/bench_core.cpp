#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "divsamp/eval.hpp"
#include "divsamp/geometry.hpp"
#include "divsamp/sampler.hpp"

namespace {

using divsamp::Vector;

std::vector<Vector> uniform_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> pts(n, Vector(dim));
  for (auto& p : pts) {
    for (auto& x : p) x = u(rng);
  }
  return pts;
}

void BM_HullVolume3d(benchmark::State& state) {
  const auto pts = uniform_points(static_cast<std::size_t>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(divsamp::hull_volume(pts));
}
BENCHMARK(BM_HullVolume3d)->Arg(10)->Arg(20)->Arg(100);

void BM_Divscore(benchmark::State& state) {
  const auto centers = uniform_points(static_cast<std::size_t>(state.range(0)), 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(divsamp::divscore(centers, 3));
}
BENCHMARK(BM_Divscore)->Arg(10)->Arg(20);

void BM_SwapVolumes(benchmark::State& state) {
  const auto centers = uniform_points(static_cast<std::size_t>(state.range(0)), 64, 3);
  const auto candidate = uniform_points(1, 64, 4).front();
  const auto policy = state.range(1) ? divsamp::SwapBasis::kPerSwap : divsamp::SwapBasis::kPerFrame;
  for (auto _ : state) benchmark::DoNotOptimize(divsamp::swap_volumes(centers, candidate, 3, policy));
}
BENCHMARK(BM_SwapVolumes)->Args({10, 0})->Args({20, 0})->Args({10, 1})->Args({20, 1});

void BM_ObserveThroughput(benchmark::State& state) {
  std::vector<divsamp::ClusterSpec> clusters;
  for (std::size_t c = 0; c < 10; ++c) {
    Vector center(64, 0.0);
    center[c] = 20.0;
    clusters.push_back({center, 1.0, 1000});
  }
  const auto stream = divsamp::synth_mixture(clusters, divsamp::StreamOrder::kSequential, 5).frames;
  divsamp::SamplerConfig config;
  config.k = static_cast<std::size_t>(state.range(0));
  config.record_history = false;
  for (auto _ : state) {
    divsamp::SamplerState sampler(config);
    for (const auto& f : stream) sampler.observe(f);
    benchmark::DoNotOptimize(sampler.exemplars());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_ObserveThroughput)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
