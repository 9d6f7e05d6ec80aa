#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flowsentry/model.hpp"
#include "flowsentry/split.hpp"

namespace flowsentry {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;  // whole graphs per optimizer step
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  ModelConfig model;
  ScoreConfig score;
};

struct EpochRecord {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // mean per-graph total loss over the epoch
  double val_loss = 0;
  std::optional<double> val_roc_auc;
  std::optional<double> val_average_precision;
  std::optional<double> val_precision_at_10;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  ParameterStore params;
  TrainLog log;
};

/// Called after each completed epoch, outside the label-access guard, so it
/// may compute labeled validation metrics into the record.
using EpochObserver = std::function<void(int epoch, const ParameterStore& params, EpochRecord&)>;

/// Mini-batch training. Per epoch the training graphs are reshuffled and
/// re-augmented, losses are summed per batch, and one Adam step is taken per
/// batch. Fully deterministic for a fixed (dataset, split, config) triple.
/// The entire loss path runs under a LabelAccessGuard.
TrainResult train(const std::vector<WorkflowGraph>& dataset, const DatasetSplit& split,
                  const TrainConfig& config, const EpochObserver& observer = nullptr);

struct GraphScores {
  std::string graph_id;
  std::vector<std::string> node_ids;
  ScoreReport report;
};

struct PrecisionAtK {
  std::size_t k = 0;
  double value = 0;
};

struct MetricSummary {
  double roc_auc = 0;
  double average_precision = 0;
  std::vector<PrecisionAtK> precision_at;  // k in {5, 10, 20, population}
};

struct EvalResult {
  std::vector<GraphScores> per_graph;
  std::optional<MetricSummary> metrics;
};

/// Scores every node of every listed graph. When metrics are requested the
/// listed graphs must carry labels; the summary is computed over the
/// concatenated node population using the same scores the decisions used.
EvalResult evaluate(const std::vector<WorkflowGraph>& dataset,
                    const std::vector<std::string>& ids, const ParameterStore& params,
                    const TrainConfig& config, bool with_metrics);

}  // namespace flowsentry
