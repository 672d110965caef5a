#include <benchmark/benchmark.h>

#include <vector>

#include "ubm/free_ubm.hpp"
#include "ubm/rng.hpp"
#include "ubm/simulator.hpp"
#include "ubm/spectral.hpp"
#include "ubm/transport.hpp"

namespace {

void BM_Normal(benchmark::State& state) {
  ubm::RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_Normal);

void BM_GeodesicStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ubm::RngStream rng(1, 0);
  auto u = ubm::UnitaryMatrix::identity(n);
  for (auto _ : state) u = ubm::step(u, 0.01, rng, ubm::Integrator::geodesic);
}
BENCHMARK(BM_GeodesicStep)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_EulerStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ubm::RngStream rng(1, 0);
  auto u = ubm::UnitaryMatrix::identity(n);
  for (auto _ : state) u = ubm::step(u, 0.01, rng, ubm::Integrator::euler_projected);
}
BENCHMARK(BM_EulerStep)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_Eigenangles(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto u = ubm::sample_endpoint(ubm::SimConfig::with_defaults(n, 1.0, 1, 1), 0);
  for (auto _ : state) benchmark::DoNotOptimize(ubm::eigenangles(u));
}
BENCHMARK(BM_Eigenangles)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

// Pooled-versus-single comparison, the inner loop of the rate experiments.
void BM_W1Geodesic(benchmark::State& state) {
  const int atoms = static_cast<int>(state.range(0));
  ubm::RngStream rng(2, 0);
  std::vector<double> a(atoms), b(atoms), w(atoms, 1.0);
  for (int i = 0; i < atoms; ++i) {
    a[i] = 6.0 * rng.uniform() - 3.0;
    b[i] = 6.0 * rng.uniform() - 3.0;
  }
  const auto mu = ubm::CircleMeasure::from_unsorted(a, w);
  const auto nu = ubm::CircleMeasure::from_unsorted(b, w);
  for (auto _ : state) benchmark::DoNotOptimize(ubm::w1_geodesic(mu, nu));
  state.SetComplexityN(atoms);
}
BENCHMARK(BM_W1Geodesic)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oNLogN);

void BM_ChordalExact(benchmark::State& state) {
  const int atoms = static_cast<int>(state.range(0));
  ubm::RngStream rng(3, 0);
  std::vector<double> a(atoms), b(atoms), w(atoms, 1.0);
  for (int i = 0; i < atoms; ++i) {
    a[i] = 6.0 * rng.uniform() - 3.0;
    b[i] = 6.0 * rng.uniform() - 3.0;
  }
  const auto mu = ubm::CircleMeasure::from_unsorted(a, w);
  const auto nu = ubm::CircleMeasure::from_unsorted(b, w);
  for (auto _ : state) benchmark::DoNotOptimize(ubm::w1_discrete(mu, nu, ubm::CostKind::chordal_exact));
}
BENCHMARK(BM_ChordalExact)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_CertifiedMoment(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ubm::evaluate_moment(k, 1.0));
}
BENCHMARK(BM_CertifiedMoment)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ModelBuild(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(ubm::FreeMeasureModel::build(t));
}
BENCHMARK(BM_ModelBuild)->Arg(1)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_QuantileDiscretize(benchmark::State& state) {
  const auto model = ubm::FreeMeasureModel::build(2.0);
  const auto q = model.quantile_function();
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ubm::quantile_discretize(q, m));
}
BENCHMARK(BM_QuantileDiscretize)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
