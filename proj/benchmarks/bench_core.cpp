#include <geosocial/geosocial.hpp>
#include <geosocial/graph.hpp>
#include <geosocial/metrics.hpp>
#include <geosocial/rankone.hpp>
#include <geosocial/spectral.hpp>
#include <geosocial/synthesis.hpp>
#include <geosocial/transport.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace geosocial;

namespace {

struct Fixture {
  Roster roster;
  Partition truth;
  SymmetricMatrix affinity;
};

Fixture make_fixture(std::size_t gangs, std::size_t size) {
  Fixture f;
  f.roster = synth_roster(lattice_config(gangs, size, 1000.0, 3.0, RunSeed(1)));
  f.truth = partition_from_labels(f.roster);
  const auto gt = gt_matrix(f.truth);
  const auto observed = degrade(gt, NoiseParams(0.5, 0.1), RunSeed(2));
  const auto kernel = build_distance_kernel(f.roster, estimate_sigma(f.roster, observed));
  f.affinity = build_affinity(social_environment(observed), kernel, 0.5);
  return f;
}

Partition random_partition(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  Partition p{k, std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) p.assign[i] = i < k ? i : pick(rng);
  return p;
}

void BM_NormalizedSpectrum(benchmark::State& state) {
  const auto f = make_fixture(10, std::size_t(state.range(0)) / 10);
  for (auto _ : state) benchmark::DoNotOptimize(normalized_spectrum(f.affinity, 10));
}
BENCHMARK(BM_NormalizedSpectrum)->Arg(100)->Arg(300)->Arg(750)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const auto f = make_fixture(10, std::size_t(state.range(0)) / 10);
  const auto s = normalized_spectrum(f.affinity, 10);
  std::uint64_t restart = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(s.vectors, 10, RunSeed(3).derive(restart++)));
}
BENCHMARK(BM_KMeans)->Arg(300)->Arg(750)->Unit(benchmark::kMicrosecond);

void BM_ZRand(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto n = std::size_t(state.range(0));
  const auto a = random_partition(n, 31, rng);
  const auto b = random_partition(n, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(z_rand(a, b));
}
BENCHMARK(BM_ZRand)->Arg(748)->Arg(10000);

void BM_ClusterDistance(benchmark::State& state) {
  const auto f = make_fixture(10, std::size_t(state.range(0)) / 10);
  std::mt19937_64 rng(5);
  const auto p = random_partition(f.roster.size(), 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cluster_distance(p, f.truth, f.roster));
}
BENCHMARK(BM_ClusterDistance)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_SecularUpdate(benchmark::State& state) {
  const auto f = make_fixture(10, std::size_t(state.range(0)) / 10);
  const auto dec = eigen_decompose(f.affinity);
  const Eigen::VectorXd z = dec.q.transpose() * Eigen::VectorXd::Ones(dec.d.size());
  for (auto _ : state) {
    const auto lambda = secular_eigenvalues(dec.d, z);
    benchmark::DoNotOptimize(updated_eigenvectors(dec.q, dec.d, lambda, z));
  }
}
BENCHMARK(BM_SecularUpdate)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
