#include <benchmark/benchmark.h>

#include <cmath>

#include "torusfio/boundedness_lab.hpp"
#include "torusfio/operator_engine.hpp"
#include "torusfio/random.hpp"
#include "torusfio/torus_fourier.hpp"

using namespace torusfio;

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::vector<Complex> noise(std::size_t n, std::uint64_t seed) {
  Stream s(seed, 0);
  std::vector<Complex> v(n);
  for (auto& z : v) z = s.complex_normal();
  return v;
}

PhaseFunction half_wave(int dim, double t) {
  PhaseFunction p = linear_phase(dim);
  p.name = "half-wave";
  p.value = [dim, t](const Coord& x, const Coord& xi) { return dot(x, xi, dim) + t * euclidean_norm(xi, dim); };
  p.multiplier_remainder = [dim, t](const Coord& xi) { return t * euclidean_norm(xi, dim); };
  return p;
}

// no multiplier structure, so operators fall back to the kernel matrix
PhaseFunction perturbed(int dim, double c) {
  PhaseFunction p = linear_phase(dim);
  p.name = "perturbed";
  p.value = [dim, c](const Coord& x, const Coord& xi) {
    return dot(x, xi, dim) + c * std::cos(kTwoPi * x[0]) * euclidean_norm(xi, dim);
  };
  p.multiplier_remainder = nullptr;
  return p;
}

void BM_ForwardFFT(benchmark::State& st) {
  const int dim = static_cast<int>(st.range(0)), n = static_cast<int>(st.range(1));
  const TorusGrid g(dim, n);
  PeriodicFunction f(g);
  f.values = noise(g.size(), 1);
  for (auto _ : st) benchmark::DoNotOptimize(forward_transform(f));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_ForwardFFT)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256})->Args({3, 32});

void BM_ApplyModes(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const TorusGrid g(2, n);
  const auto A = FsoOperator::create(half_wave(2, 0.25), bracket_power_symbol(2, 0.0), g, FrequencyCube::for_grid(g));
  const auto f = noise(g.size(), 2);
  A.kernel();
  for (auto _ : st) benchmark::DoNotOptimize(A.kernel().apply(f));
}
BENCHMARK(BM_ApplyModes)->Arg(32)->Arg(64)->Arg(132);

void BM_ApplyMatrix(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const TorusGrid g(1, n);
  const auto A = FsoOperator::create(perturbed(1, 0.1), bracket_power_symbol(1, 0.0), g, FrequencyCube::for_grid(g));
  const auto f = noise(g.size(), 3);
  A.kernel();
  for (auto _ : st) benchmark::DoNotOptimize(A.kernel().apply(f));
}
BENCHMARK(BM_ApplyMatrix)->Arg(64)->Arg(256)->Arg(1024);

void BM_AssembleDense(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const TorusGrid g(2, n);
  const auto A = FsoOperator::create(half_wave(2, 0.25), bracket_power_symbol(2, -0.5), g, FrequencyCube::for_grid(g));
  for (auto _ : st) benchmark::DoNotOptimize(assemble_matrix(A));
}
BENCHMARK(BM_AssembleDense)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ExactNorm(benchmark::State& st) {
  const TorusGrid g(2, static_cast<int>(st.range(0)));
  const auto M = assemble_matrix(
      FsoOperator::create(perturbed(2, 0.05), bracket_power_symbol(2, 0.0), g, FrequencyCube::for_grid(g)));
  for (auto _ : st) benchmark::DoNotOptimize(norm_p2_exact(M));
}
BENCHMARK(BM_ExactNorm)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ProbeNorm(benchmark::State& st) {
  const int cutoff = static_cast<int>(st.range(0));
  const TorusGrid g(2, 4 * cutoff + 4);
  const auto A = FsoOperator::create(half_wave(2, 0.25), bracket_power_symbol(2, 0.0), g, FrequencyCube(2, cutoff));
  ProbeOptions o;
  o.probes = 32;
  for (auto _ : st) benchmark::DoNotOptimize(norm_lp_probe(A, 4.0, o));
}
BENCHMARK(BM_ProbeNorm)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
