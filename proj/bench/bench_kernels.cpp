// Serial reference versus OpenMP kernels. The second argument of each
// benchmark selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "wgf/kernels.hpp"
#include "wgf/measures.hpp"
#include "wgf/scheme.hpp"
#include "wgf/wasserstein.hpp"

using namespace wgf;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

std::vector<double> normals(std::size_t n, std::uint64_t seed = 1) {
  std::vector<double> v(n);
  kernels::fill_standard_normal(v, seed, Exec::serial);
  return v;
}

void BM_Sampling(benchmark::State& state) {
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::fill_standard_normal(v, 42, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Moments(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto v = normals(n * 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::column_moments(v, n, 2, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParticleFbStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cloud = sample_gaussian(GaussianMeasure({10.0}, {1e4}), n, Rng(42));
  const auto f = Potential::isotropic_quadratic(1, 1.0);
  const auto h = InternalEnergy::negative_entropy();
  for (auto _ : state) benchmark::DoNotOptimize(fb_step(f, h, 0.1, cloud, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NodeMap(benchmark::State& state) {
  auto q = normals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::node_gradient_step(q, [](double x) { return std::tanh(x); }, 1e-6, exec_of(state));
    benchmark::DoNotOptimize(q.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DistanceMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normals(n * 3), b = normals(n * 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::squared_distance_matrix(a, b, n, 3, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_ExactW2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ParticleCloud a(n, 2, normals(n * 2)), b(n, 2, normals(n * 2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(w2_particles_exact(a, b, kDefaultExactCap, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_Sampling)->ArgsProduct({{1 << 17, 1 << 20}, {0, 1}});
BENCHMARK(BM_Moments)->ArgsProduct({{1 << 17, 1 << 20}, {0, 1}});
BENCHMARK(BM_ParticleFbStep)->ArgsProduct({{100000}, {0, 1}});
BENCHMARK(BM_NodeMap)->ArgsProduct({{1 << 16}, {0, 1}});
BENCHMARK(BM_DistanceMatrix)->ArgsProduct({{512, 2048}, {0, 1}});
BENCHMARK(BM_ExactW2)->ArgsProduct({{256}, {0, 1}});

BENCHMARK_MAIN();
