#include <benchmark/benchmark.h>

#include "flowsentry/dataset_io.hpp"
#include "flowsentry/metrics.hpp"
#include "flowsentry/trainer.hpp"

using namespace flowsentry;

namespace {

std::vector<WorkflowGraph> bench_dataset(int graphs) {
  SynthDatasetOptions options;
  options.graph_count = graphs;
  options.base.levels = 7;
  options.base.width = 20;
  options.base.anomaly_fraction = 0.1;
  options.base.severity = 5.0;
  options.base.seed = 9;
  options.rotation = {AnomalyType::kCpu, AnomalyType::kHdd};
  const auto [manifest, raw] = make_synthetic_dataset(options);
  return preprocess_synthetic(manifest, raw);
}

void BM_Augment(benchmark::State& state) {
  const auto dataset = bench_dataset(1);
  AugmentConfig config;
  config.selection_rate = 0.3;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    config.seed = seed++;
    benchmark::DoNotOptimize(augment(dataset.front(), config));
  }
}
BENCHMARK(BM_Augment);

void BM_TrainEpoch(benchmark::State& state) {
  const auto dataset = bench_dataset(8);
  std::vector<std::string> ids;
  for (const auto& g : dataset) ids.push_back(g.id());
  const DatasetSplit split{{ids.begin(), ids.begin() + 6}, {ids[6]}, {ids[7]}};
  TrainConfig config;
  config.epochs = 1;
  config.batch_size = 6;
  config.model.latent.law = static_cast<LatentLaw>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(dataset, split, config));
  }
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(static_cast<int>(LatentLaw::kNormal))
    ->Arg(static_cast<int>(LatentLaw::kGumbel));

void BM_ScoreGraph(benchmark::State& state) {
  const auto dataset = bench_dataset(4);
  std::vector<std::string> ids;
  for (const auto& g : dataset) ids.push_back(g.id());
  const DatasetSplit split{{ids.begin(), ids.begin() + 3}, {}, {ids[3]}};
  TrainConfig config;
  config.epochs = 2;
  const auto result = train(dataset, split, config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(dataset, split.test, result.params, config, true));
  }
}
BENCHMARK(BM_ScoreGraph);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = i % 10 == 0 ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(roc_auc(scores, labels));
  }
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
