#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowsentry/matrix.hpp"

namespace flowsentry {

enum class AnomalyType {
  kNone,
  kCpu,
  kHdd,
};

const char* to_string(AnomalyType type);
AnomalyType anomaly_type_from_string(const std::string& name);

/// Layered-DAG generator settings. Defaults give ~140 nodes and ~240 edges
/// per execution, in the ballpark of a small production workflow.
struct SynthConfig {
  int levels = 7;
  int width = 20;
  int fan_in = 2;  // parents drawn per node from the previous level
  AnomalyType anomaly = AnomalyType::kNone;
  /// Severity K: larger K perturbs the affected features harder.
  double severity = 5.0;
  /// Fraction of nodes perturbed (and labeled 1).
  double anomaly_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// One generated execution, raw: directed adjacency and unnormalized
/// features. The loader pipeline (symmetrize, shift, normalize) is applied
/// when the graph is read back from disk.
struct SynthGraph {
  Matrix raw_adjacency;  // directed, level l -> l+1 only
  Matrix features;       // runtime, cpu_time, bytes_read, bytes_written, timestamp
  std::vector<std::uint8_t> labels;
  std::vector<std::string> node_ids;
  AnomalyType anomaly = AnomalyType::kNone;
};

/// Feature schema emitted by the generator; the last column is flagged as a
/// timestamp in manifests.
std::vector<std::string> synth_feature_names();

/// Baseline telemetry comes from seeded lognormal-like draws. CPU anomalies
/// inflate runtime and deflate cpu_time; disk anomalies inflate runtime and
/// both byte counters. Exactly the perturbed nodes are labeled 1.
SynthGraph generate_synthetic(const SynthConfig& config);

/// True when the directed adjacency admits a topological order.
bool is_acyclic(const Matrix& directed_adjacency);

}  // namespace flowsentry
