#include "flowsentry/synth.hpp"

#include <algorithm>
#include <cmath>

#include "flowsentry/error.hpp"
#include "flowsentry/rng.hpp"

namespace flowsentry {

const char* to_string(AnomalyType type) {
  switch (type) {
    case AnomalyType::kNone:
      return "none";
    case AnomalyType::kCpu:
      return "cpu";
    case AnomalyType::kHdd:
      return "hdd";
  }
  return "none";
}

AnomalyType anomaly_type_from_string(const std::string& name) {
  if (name == "none") return AnomalyType::kNone;
  if (name == "cpu") return AnomalyType::kCpu;
  if (name == "hdd") return AnomalyType::kHdd;
  throw ConfigError("unknown anomaly type '" + name + "'");
}

std::vector<std::string> synth_feature_names() {
  return {"runtime", "cpu_time", "bytes_read", "bytes_written", "timestamp"};
}

namespace {

void validate(const SynthConfig& config) {
  if (config.levels < 1 || config.width < 1) {
    throw ConfigError("graph shape must have positive levels and width");
  }
  if (config.fan_in < 1) {
    throw ConfigError("fan-in must be positive");
  }
  if (config.anomaly_fraction < 0.0 || config.anomaly_fraction > 1.0) {
    throw ConfigError("anomaly fraction must lie in [0,1]");
  }
  if (!(config.severity > 0.0)) {
    throw ConfigError("severity must be positive");
  }
}

}  // namespace

SynthGraph generate_synthetic(const SynthConfig& config) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.levels) * static_cast<std::size_t>(config.width);
  Rng rng(derive_seed(config.seed, "synth"));

  SynthGraph graph;
  graph.anomaly = config.anomaly;
  graph.raw_adjacency = Matrix(n, n);
  graph.node_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "n%04lu", static_cast<unsigned long>(i));
    graph.node_ids.emplace_back(buf);
  }

  // Edges run level l -> l+1 only, which keeps the graph acyclic by
  // construction; each child samples distinct parents.
  const auto width = static_cast<std::size_t>(config.width);
  for (int level = 1; level < config.levels; ++level) {
    const std::size_t parent_base = static_cast<std::size_t>(level - 1) * width;
    for (std::size_t slot = 0; slot < width; ++slot) {
      const std::size_t child = static_cast<std::size_t>(level) * width + slot;
      const std::size_t parents = std::min<std::size_t>(width, config.fan_in);
      std::vector<std::size_t> pool(width);
      for (std::size_t i = 0; i < width; ++i) pool[i] = parent_base + i;
      for (std::size_t i = 0; i < parents; ++i) {
        const std::size_t j = i + rng.bounded(pool.size() - i);
        std::swap(pool[i], pool[j]);
        graph.raw_adjacency(pool[i], child) = 1.0;
      }
    }
  }

  // Baseline telemetry: tight lognormal-like draws with a mild
  // level-dependent location, plus a wall-clock timestamp advancing level by
  // level. The spread is kept narrow so planted anomalies stand out.
  graph.features = Matrix(n, 5);
  const double epoch_base = 1.7e9 + static_cast<double>(rng.bounded(1000000));
  for (int level = 0; level < config.levels; ++level) {
    const double level_runtime_mu = std::log(40.0 + 4.0 * static_cast<double>(level % 3));
    const double level_bytes_mu = std::log(1.0e6 * (1.0 + 0.25 * static_cast<double>(level)));
    for (std::size_t slot = 0; slot < width; ++slot) {
      const std::size_t node = static_cast<std::size_t>(level) * width + slot;
      const double runtime = std::exp(level_runtime_mu + 0.18 * rng.normal());
      const double efficiency = 0.78 + 0.12 * rng.uniform();
      const double bytes_read = std::exp(level_bytes_mu + 0.22 * rng.normal());
      const double write_ratio = 0.45 + 0.15 * rng.uniform();
      graph.features(node, 0) = runtime;
      graph.features(node, 1) = runtime * efficiency;
      graph.features(node, 2) = bytes_read;
      graph.features(node, 3) = bytes_read * write_ratio;
      graph.features(node, 4) =
          epoch_base + 60.0 * static_cast<double>(level) + 5.0 * rng.uniform();
    }
  }

  // Plant anomalies on a uniform node subset; one anomaly type per graph.
  graph.labels.assign(n, 0);
  const auto planted = static_cast<std::size_t>(std::llround(config.anomaly_fraction *
                                                             static_cast<double>(n)));
  if (config.anomaly != AnomalyType::kNone && planted > 0) {
    std::vector<std::size_t> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
    for (std::size_t i = 0; i < planted; ++i) {
      const std::size_t j = i + rng.bounded(nodes.size() - i);
      std::swap(nodes[i], nodes[j]);
    }
    const double k = config.severity;
    for (std::size_t i = 0; i < planted; ++i) {
      const std::size_t node = nodes[i];
      graph.labels[node] = 1;
      if (config.anomaly == AnomalyType::kCpu) {
        // cores lost: wall time stretches while useful cpu time shrinks
        graph.features(node, 0) *= 1.0 + 0.2 * k;
        graph.features(node, 1) /= 1.0 + 0.2 * k;
      } else {
        // throttled disk: wall time stretches and the io counters balloon
        graph.features(node, 0) *= 1.0 + 0.12 * k;
        graph.features(node, 2) *= 1.0 + 0.2 * k;
        graph.features(node, 3) *= 1.0 + 0.2 * k;
      }
    }
  }
  return graph;
}

bool is_acyclic(const Matrix& directed_adjacency) {
  if (directed_adjacency.rows() != directed_adjacency.cols()) {
    throw FormatError("adjacency must be square");
  }
  const std::size_t n = directed_adjacency.rows();
  std::vector<std::size_t> in_degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (directed_adjacency(i, j) != 0.0) ++in_degree[j];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_degree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t v = 0; v < n; ++v) {
      if (directed_adjacency(u, v) != 0.0 && --in_degree[v] == 0) {
        ready.push_back(v);
      }
    }
  }
  return visited == n;
}

}  // namespace flowsentry
