#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowsentry/graph.hpp"
#include "flowsentry/split.hpp"
#include "flowsentry/synth.hpp"
#include "flowsentry/trainer.hpp"

namespace flowsentry {

struct FeatureColumn {
  std::string name;
  bool timestamp = false;  // shifted to a zero minimum before normalization
};

struct ManifestEntry {
  std::string id;
  std::string nodes_path;   // relative to the manifest directory
  std::string edges_path;
  std::string labels_path;  // empty when the graph is unlabeled
};

struct DatasetManifest {
  int version = 1;
  std::vector<FeatureColumn> features;
  std::vector<ManifestEntry> graphs;
  std::array<double, 3> split_ratios{0.6, 0.2, 0.2};
  std::uint64_t split_seed = 0;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// The manifest's deterministic train/val/test partition.
DatasetSplit manifest_split(const DatasetManifest& manifest);

/// Raw graph data -> preprocessed WorkflowGraph: acyclicity check on the
/// directed edges, symmetrization, timestamp shift, column normalization.
WorkflowGraph assemble_graph(const std::string& id, const Matrix& raw_adjacency,
                             const Matrix& raw_features, std::vector<std::string> node_ids,
                             std::optional<std::vector<std::uint8_t>> labels,
                             const std::vector<FeatureColumn>& schema);

/// Loads, validates, and preprocesses every graph listed in the manifest.
std::vector<WorkflowGraph> load_dataset(const std::filesystem::path& manifest_path);

/// Writes one graph's nodes.csv / edges.csv / labels.csv under the dataset
/// directory at the paths named by the entry.
void write_graph_files(const std::filesystem::path& dataset_dir, const ManifestEntry& entry,
                       const SynthGraph& graph, const std::vector<FeatureColumn>& schema);

struct SynthDatasetOptions {
  int graph_count = 60;
  SynthConfig base;  // per-graph seeds derive from base.seed
  /// Anomaly type per graph index (cycled); empty uses base.anomaly.
  std::vector<AnomalyType> rotation;
  std::array<double, 3> split_ratios{0.6, 0.2, 0.2};
};

/// Generates a labeled multi-graph dataset with per-graph seed streams.
std::pair<DatasetManifest, std::vector<SynthGraph>> make_synthetic_dataset(
    const SynthDatasetOptions& options);

/// In-memory preprocessing of generated graphs (same pipeline as loading).
std::vector<WorkflowGraph> preprocess_synthetic(const DatasetManifest& manifest,
                                                const std::vector<SynthGraph>& graphs);

struct ScoreRow {
  std::string graph_id;
  std::string node_id;
  double raw_score = 0;
  double normalized_score = 0;
  int decision = 0;
  int rank = 0;  // 1 = highest raw score within its graph
};

void write_score_csv(const std::filesystem::path& path, const std::vector<GraphScores>& reports);
std::vector<ScoreRow> read_score_csv(const std::filesystem::path& path);

/// Line-delimited JSON, one record per epoch.
void write_train_log(const std::filesystem::path& path, const TrainLog& log);

void write_metrics_json(const std::filesystem::path& path, const MetricSummary& summary);

/// Strict JSON -> TrainConfig (unknown keys are ConfigErrors).
TrainConfig read_train_config(const std::filesystem::path& path);
void write_train_config(const std::filesystem::path& path, const TrainConfig& config);

}  // namespace flowsentry
