#include "flowsentry/trainer.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "flowsentry/error.hpp"
#include "flowsentry/metrics.hpp"

namespace flowsentry {

namespace {

std::map<std::string, std::size_t> index_by_id(const std::vector<WorkflowGraph>& dataset) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!index.emplace(dataset[i].id(), i).second) {
      throw DataError("duplicate graph id '" + dataset[i].id() + "'");
    }
  }
  return index;
}

std::vector<std::size_t> resolve_ids(const std::map<std::string, std::size_t>& index,
                                     const std::vector<std::string>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw DataError("graph id '" + id + "' not present in dataset");
    }
    out.push_back(it->second);
  }
  return out;
}

void validate(const TrainConfig& config) {
  if (config.epochs < 0) {
    throw ConfigError("epochs must be non-negative");
  }
  if (config.batch_size < 1) {
    throw ConfigError("batch size must be positive");
  }
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
  if (config.weight_decay < 0.0) {
    throw ConfigError("weight decay must be non-negative");
  }
}

std::size_t common_feature_dim(const std::vector<WorkflowGraph>& dataset,
                               const std::vector<std::size_t>& indices) {
  const std::size_t dim = dataset[indices.front()].feature_dim();
  for (const std::size_t i : indices) {
    if (dataset[i].feature_dim() != dim) {
      throw DataError("graph '" + dataset[i].id() + "' has feature dimension " +
                      std::to_string(dataset[i].feature_dim()) + ", expected " +
                      std::to_string(dim));
    }
  }
  return dim;
}

GraphLossInputs make_loss_inputs(const WorkflowGraph& graph, const TrainConfig& config,
                                 std::string_view stream, int epoch, std::size_t graph_index) {
  GraphLossInputs inputs;
  inputs.graph = &graph;
  AugmentConfig augment_config = config.model.augment;
  augment_config.seed = derive_seed(config.seed, stream, static_cast<std::uint64_t>(epoch),
                                    graph_index, 0);
  inputs.augmentation = augment(graph, augment_config);
  Rng noise_rng(
      derive_seed(config.seed, stream, static_cast<std::uint64_t>(epoch), graph_index, 1));
  const auto k = static_cast<std::size_t>(config.model.encoder.latent_dim);
  inputs.noise_original = draw_latent_noise(graph.node_count(), k, config.model.latent, noise_rng);
  inputs.noise_augmented = draw_latent_noise(graph.node_count(), k, config.model.latent, noise_rng);
  return inputs;
}

}  // namespace

TrainResult train(const std::vector<WorkflowGraph>& dataset, const DatasetSplit& split,
                  const TrainConfig& config, const EpochObserver& observer) {
  validate(config);
  if (split.train.empty()) {
    throw ConfigError("training split is empty");
  }
  const auto index = index_by_id(dataset);
  const std::vector<std::size_t> train_indices = resolve_ids(index, split.train);
  const std::vector<std::size_t> val_indices = resolve_ids(index, split.val);

  std::vector<std::size_t> all_indices = train_indices;
  all_indices.insert(all_indices.end(), val_indices.begin(), val_indices.end());
  const std::size_t feature_dim = common_feature_dim(dataset, all_indices);

  TrainResult result;
  result.params =
      init_model_parameters(static_cast<int>(feature_dim), config.model, config.seed);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    {
      // Ground-truth labels are unreachable from here to the end of the
      // epoch; any read throws.
      LabelAccessGuard guard;

      std::vector<std::size_t> order = train_indices;
      Rng shuffle_rng(derive_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
      shuffle_rng.shuffle(order);

      double epoch_loss_sum = 0.0;
      std::size_t batch_start = 0;
      std::size_t batch_number = 0;
      while (batch_start < order.size()) {
        const std::size_t batch_end =
            std::min(order.size(), batch_start + static_cast<std::size_t>(config.batch_size));
        ++batch_number;
        try {
          Tape tape;
          const auto vars = register_parameters(tape, result.params);
          Tape::Var batch_loss;
          bool first = true;
          for (std::size_t b = batch_start; b < batch_end; ++b) {
            const std::size_t gi = order[b];
            const GraphLossInputs inputs =
                make_loss_inputs(dataset[gi], config, "train", epoch, gi);

            const NeighborLists* neighbor_override = nullptr;
            NeighborLists sampled;
            if (config.model.encoder.neighbor_sample > 0) {
              Rng neighbor_rng(derive_seed(config.seed, "neighbors",
                                           static_cast<std::uint64_t>(epoch), gi));
              sampled = sample_neighbors(dataset[gi], config.model.encoder.neighbor_sample,
                                         neighbor_rng);
              neighbor_override = &sampled;
            }

            const Tape::Var graph_loss =
                graph_total_loss(tape, inputs, config.model, vars, neighbor_override);
            epoch_loss_sum += tape.value(graph_loss)(0, 0);
            batch_loss = first ? graph_loss : tape.add(batch_loss, graph_loss);
            first = false;
          }
          const auto grads = gradients(tape, batch_loss, vars);
          adam_step(result.params, grads, config.learning_rate, config.weight_decay);
        } catch (const NumericError& err) {
          throw TrainingError("diverged at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_number) + ": " + err.what());
        }
        batch_start = batch_end;
      }
      record.train_loss = epoch_loss_sum / static_cast<double>(order.size());

      double val_loss_sum = 0.0;
      for (const std::size_t gi : val_indices) {
        const GraphLossInputs inputs = make_loss_inputs(dataset[gi], config, "val", epoch, gi);
        val_loss_sum += graph_total_loss_value(inputs, config.model, result.params);
      }
      record.val_loss =
          val_indices.empty() ? 0.0 : val_loss_sum / static_cast<double>(val_indices.size());
    }
    if (observer) {
      observer(epoch, result.params, record);
    }
    result.log.epochs.push_back(record);
  }
  return result;
}

EvalResult evaluate(const std::vector<WorkflowGraph>& dataset, const std::vector<std::string>& ids,
                    const ParameterStore& params, const TrainConfig& config, bool with_metrics) {
  if (ids.empty()) {
    throw EvaluationError("no graphs to evaluate");
  }
  const auto index = index_by_id(dataset);
  const std::vector<std::size_t> indices = resolve_ids(index, ids);

  EvalResult result;
  std::vector<double> pooled_scores;
  std::vector<std::uint8_t> pooled_labels;
  const std::uint64_t score_seed = derive_seed(config.seed, "score");

  for (const std::size_t gi : indices) {
    const WorkflowGraph& graph = dataset[gi];
    const std::vector<double> scores =
        score_graph(graph, params, config.model, derive_seed(score_seed, graph.id()));
    GraphScores entry;
    entry.graph_id = graph.id();
    entry.node_ids = graph.node_ids();
    entry.report = decide(scores, config.score);

    if (with_metrics) {
      if (!graph.has_labels()) {
        throw EvaluationError("metrics requested but graph '" + graph.id() + "' has no labels");
      }
      const auto& labels = graph.labels();
      pooled_labels.insert(pooled_labels.end(), labels.begin(), labels.end());
      pooled_scores.insert(pooled_scores.end(), entry.report.normalized_scores.begin(),
                           entry.report.normalized_scores.end());
    }
    result.per_graph.push_back(std::move(entry));
  }

  if (with_metrics) {
    MetricSummary summary;
    summary.roc_auc = roc_auc(pooled_scores, pooled_labels);
    summary.average_precision = average_precision(pooled_scores, pooled_labels);
    std::vector<std::size_t> ks = {5, 10, 20, pooled_scores.size()};
    std::erase_if(ks, [&](std::size_t k) { return k < 1 || k > pooled_scores.size(); });
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (const std::size_t k : ks) {
      summary.precision_at.push_back({k, precision_at_k(pooled_scores, pooled_labels, k)});
    }
    result.metrics = summary;
  }
  return result;
}

}  // namespace flowsentry
