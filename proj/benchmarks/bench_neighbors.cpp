#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "mlbalance/algorithms.hpp"
#include "mlbalance/dataset.hpp"
#include "mlbalance/neighbors.hpp"

using namespace mlbalance;

namespace {

Dataset randomDataset(std::size_t rows, std::size_t numeric, std::size_t nominal) {
  std::mt19937_64 engine(rows * 31 + numeric);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<FeatureSpec> features;
  for (std::size_t f = 0; f < numeric; ++f) features.push_back(FeatureSpec::numeric("n" + std::to_string(f)));
  for (std::size_t f = 0; f < nominal; ++f) features.push_back(FeatureSpec::nominal("c" + std::to_string(f), {"a", "b", "c", "d"}));
  std::vector<std::string> labels{"l0", "l1", "l2", "l3", "l4", "l5"};
  const std::vector<double> freq{0.45, 0.3, 0.25, 0.12, 0.08, 0.05};
  std::vector<Instance> data(rows);
  for (auto& row : data) {
    for (std::size_t f = 0; f < numeric; ++f) row.features.push_back(value(engine));
    for (std::size_t f = 0; f < nominal; ++f) row.features.push_back(static_cast<double>(engine() % 4));
    row.labels = LabelSet(labels.size());
    for (std::size_t l = 0; l < labels.size(); ++l) row.labels.set(l, value(engine) < freq[l]);
  }
  return buildDataset("bench", features, labels, data);
}

void BM_BuildCache(benchmark::State& state) {
  const auto d = randomDataset(static_cast<std::size_t>(state.range(0)), 72, 0);
  const auto vdm = buildVdmTable(d);
  CacheOptions options;
  options.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(buildNeighborCache(d, vdm, options));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildCache)
    ->ArgsProduct({{250, 593, 1000, 2000}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_BuildVdm(benchmark::State& state) {
  const auto d = randomDataset(static_cast<std::size_t>(state.range(0)), 4, 20);
  for (auto _ : state) benchmark::DoNotOptimize(buildVdmTable(d));
}
BENCHMARK(BM_BuildVdm)->Arg(593)->Arg(5000)->Unit(benchmark::kMicrosecond);

// Neighbor algorithms with and without a shared cache.
void BM_Algorithm(benchmark::State& state) {
  const auto algorithm = static_cast<Algorithm>(state.range(0));
  const bool shared = state.range(1) != 0;
  const auto d = randomDataset(593, 72, 0);
  const auto vdm = buildVdmTable(d);
  const auto cache = buildNeighborCache(d, vdm);
  const auto spec = makeSpec(algorithm);
  const SharedStructures structures = shared ? SharedStructures{&vdm, &cache} : SharedStructures{};
  for (auto _ : state) benchmark::DoNotOptimize(applyAlgorithm(spec, d, 1, structures));
  state.SetLabel(std::string(algorithmName(algorithm)) + (shared ? " cached" : " direct"));
}
BENCHMARK(BM_Algorithm)
    ->ArgsProduct({{static_cast<long>(Algorithm::MLSMOTE), static_cast<long>(Algorithm::MLSOL),
                    static_cast<long>(Algorithm::MLeNN), static_cast<long>(Algorithm::MLTL)},
                   {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
