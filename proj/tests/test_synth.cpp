#include <cmath>

#include "doctest.h"
#include "flowsentry/error.hpp"
#include "flowsentry/synth.hpp"

using namespace flowsentry;

TEST_CASE("generated graphs have the configured shape and are acyclic") {
  SynthConfig config;
  config.levels = 7;
  config.width = 20;
  config.fan_in = 2;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    config.seed = seed;
    const SynthGraph g = generate_synthetic(config);
    CHECK(g.node_ids.size() == 140);
    CHECK(g.features.rows() == 140);
    CHECK(g.features.cols() == 5);
    CHECK(is_acyclic(g.raw_adjacency));
    std::size_t edges = 0;
    for (std::size_t i = 0; i < g.raw_adjacency.size(); ++i) {
      edges += g.raw_adjacency.data()[i] != 0.0 ? 1 : 0;
    }
    CHECK(edges == 6 * 20 * 2);  // (levels-1) * width * fan_in, all parents distinct
  }
}

TEST_CASE("anomaly fraction 0 leaves every label at 0") {
  SynthConfig config;
  config.anomaly = AnomalyType::kCpu;
  config.anomaly_fraction = 0.0;
  const SynthGraph g = generate_synthetic(config);
  for (const auto label : g.labels) CHECK(label == 0);
}

TEST_CASE("anomaly fraction 1 labels every node") {
  SynthConfig config;
  config.anomaly = AnomalyType::kCpu;
  config.anomaly_fraction = 1.0;
  const SynthGraph g = generate_synthetic(config);
  for (const auto label : g.labels) CHECK(label == 1);
}

TEST_CASE("labels mark exactly the perturbed nodes") {
  SynthConfig config;
  config.anomaly = AnomalyType::kHdd;
  config.anomaly_fraction = 0.25;
  config.seed = 3;
  const SynthGraph with = generate_synthetic(config);
  config.anomaly = AnomalyType::kNone;
  const SynthGraph without = generate_synthetic(config);
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < with.labels.size(); ++i) {
    const bool changed = with.features(i, 0) != without.features(i, 0) ||
                         with.features(i, 2) != without.features(i, 2);
    CHECK(changed == (with.labels[i] == 1));
    labeled += with.labels[i];
  }
  CHECK(labeled == static_cast<std::size_t>(std::llround(0.25 * 140)));
}

TEST_CASE("cpu perturbation strength strictly increases with severity") {
  // relative runtime deviation of perturbed nodes, averaged across seeds
  auto mean_deviation = [](double severity) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SynthConfig config;
      config.anomaly_fraction = 0.2;
      config.severity = severity;
      config.seed = seed;
      config.anomaly = AnomalyType::kCpu;
      const SynthGraph with = generate_synthetic(config);
      config.anomaly = AnomalyType::kNone;
      const SynthGraph base = generate_synthetic(config);
      for (std::size_t i = 0; i < with.labels.size(); ++i) {
        if (!with.labels[i]) continue;
        total += std::abs(with.features(i, 0) - base.features(i, 0)) / base.features(i, 0);
        ++count;
      }
    }
    return total / static_cast<double>(count);
  };
  const double dev2 = mean_deviation(2.0);
  const double dev3 = mean_deviation(3.0);
  const double dev4 = mean_deviation(4.0);
  CHECK(dev2 < dev3);
  CHECK(dev3 < dev4);
}

TEST_CASE("hdd anomalies inflate the io counters") {
  SynthConfig config;
  config.anomaly = AnomalyType::kHdd;
  config.anomaly_fraction = 0.3;
  config.seed = 11;
  const SynthGraph with = generate_synthetic(config);
  config.anomaly = AnomalyType::kNone;
  const SynthGraph base = generate_synthetic(config);
  for (std::size_t i = 0; i < with.labels.size(); ++i) {
    if (!with.labels[i]) continue;
    CHECK(with.features(i, 2) > base.features(i, 2));
    CHECK(with.features(i, 3) > base.features(i, 3));
    CHECK(with.features(i, 1) == base.features(i, 1));  // cpu_time untouched
  }
}

TEST_CASE("generation is deterministic in the seed") {
  SynthConfig config;
  config.anomaly = AnomalyType::kCpu;
  config.anomaly_fraction = 0.1;
  config.seed = 21;
  const SynthGraph a = generate_synthetic(config);
  const SynthGraph b = generate_synthetic(config);
  CHECK(a.features == b.features);
  CHECK(a.raw_adjacency == b.raw_adjacency);
  CHECK(a.labels == b.labels);
}

TEST_CASE("impossible shapes are config errors") {
  SynthConfig config;
  config.width = 0;
  CHECK_THROWS_AS(generate_synthetic(config), ConfigError);
  config.width = 3;
  config.levels = 0;
  CHECK_THROWS_AS(generate_synthetic(config), ConfigError);
  config.levels = 2;
  config.anomaly_fraction = 1.5;
  CHECK_THROWS_AS(generate_synthetic(config), ConfigError);
}

TEST_CASE("is_acyclic flags cycles") {
  CHECK(is_acyclic(Matrix{{0, 1}, {0, 0}}));
  CHECK_FALSE(is_acyclic(Matrix{{0, 1}, {1, 0}}));
  CHECK_FALSE(is_acyclic(Matrix{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
}
