#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowsentry/checkpoint.hpp"
#include "flowsentry/dataset_io.hpp"
#include "flowsentry/error.hpp"
#include "flowsentry/metrics.hpp"
#include "flowsentry/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace flowsentry;

namespace {

// Distinct exit codes per failure category (CLI11 parse errors use its own).
int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 3;
    case ErrorKind::kIo:
      return 4;
    case ErrorKind::kFormat:
    case ErrorKind::kSchema:
    case ErrorKind::kData:
      return 5;
    case ErrorKind::kShape:
    case ErrorKind::kBounds:
      return 6;
    case ErrorKind::kNumeric:
    case ErrorKind::kTraining:
      return 7;
    case ErrorKind::kEvaluation:
    case ErrorKind::kMetric:
      return 8;
  }
  return 1;
}

/// FLOWSENTRY_SEED overrides every config seed when set (CI reproducibility).
std::optional<std::uint64_t> env_seed_override() {
  const char* raw = std::getenv("FLOWSENTRY_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw ConfigError(std::string("FLOWSENTRY_SEED is not an integer: '") + raw + "'");
  }
  return static_cast<std::uint64_t>(value);
}

struct SynthArgs {
  std::string out_dir;
  int graphs = 60;
  int levels = 7;
  int width = 20;
  int fan_in = 2;
  std::string anomaly = "mixed";
  double severity = 5.0;
  double fraction = 0.1;
  std::vector<double> ratios{0.6, 0.2, 0.2};
  std::uint64_t seed = 0;
  bool no_labels = false;
};

int run_synth(const SynthArgs& args) {
  SynthDatasetOptions options;
  options.graph_count = args.graphs;
  options.base.levels = args.levels;
  options.base.width = args.width;
  options.base.fan_in = args.fan_in;
  options.base.severity = args.severity;
  options.base.anomaly_fraction = args.fraction;
  options.base.seed = env_seed_override().value_or(args.seed);
  if (args.ratios.size() != 3) {
    throw ConfigError("--ratios needs exactly three values");
  }
  options.split_ratios = {args.ratios[0], args.ratios[1], args.ratios[2]};
  if (args.anomaly == "mixed") {
    options.rotation = {AnomalyType::kCpu, AnomalyType::kHdd};
  } else {
    options.base.anomaly = anomaly_type_from_string(args.anomaly);
  }

  auto [manifest, graphs] = make_synthetic_dataset(options);
  if (args.no_labels) {
    for (auto& entry : manifest.graphs) entry.labels_path.clear();
  }
  fs::create_directories(args.out_dir);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    write_graph_files(args.out_dir, manifest.graphs[i], graphs[i], manifest.features);
  }
  write_manifest(fs::path(args.out_dir) / "manifest.json", manifest);
  std::cout << "wrote " << graphs.size() << " graphs to " << args.out_dir << "\n";
  return 0;
}

struct TrainArgs {
  std::string manifest;
  std::string config;
  std::string out_dir;
};

int run_train(const TrainArgs& args) {
  TrainConfig config = args.config.empty() ? TrainConfig{} : read_train_config(args.config);
  if (const auto seed = env_seed_override()) config.seed = *seed;

  const auto dataset = load_dataset(args.manifest);
  const auto manifest = read_manifest(args.manifest);
  const auto split = manifest_split(manifest);

  bool labeled_val = !split.val.empty();
  for (const auto& graph : dataset) {
    const bool in_val =
        std::find(split.val.begin(), split.val.end(), graph.id()) != split.val.end();
    if (in_val && !graph.has_labels()) labeled_val = false;
  }

  EpochObserver observer = nullptr;
  if (labeled_val) {
    observer = [&](int, const ParameterStore& params, EpochRecord& record) {
      try {
        const auto eval = evaluate(dataset, split.val, params, config, true);
        record.val_roc_auc = eval.metrics->roc_auc;
        record.val_average_precision = eval.metrics->average_precision;
        for (const auto& [k, value] : eval.metrics->precision_at) {
          if (k == 10) record.val_precision_at_10 = value;
        }
      } catch (const MetricError&) {
        // single-class validation labels: the losses still get logged
      }
    };
  }

  const auto result = train(dataset, split, config, observer);

  fs::create_directories(args.out_dir);
  save_checkpoint(fs::path(args.out_dir) / "checkpoint.bin", result.params);
  write_train_log(fs::path(args.out_dir) / "train_log.jsonl", result.log);
  write_train_config(fs::path(args.out_dir) / "config.json", config);
  std::cout << "trained " << config.epochs << " epochs on " << split.train.size()
            << " graphs; artifacts in " << args.out_dir << "\n";
  return 0;
}

std::vector<std::string> ids_for_subset(const DatasetManifest& manifest, const std::string& subset) {
  if (subset == "all") {
    std::vector<std::string> ids;
    for (const auto& entry : manifest.graphs) ids.push_back(entry.id);
    return ids;
  }
  const auto split = manifest_split(manifest);
  if (subset == "train") return split.train;
  if (subset == "val") return split.val;
  if (subset == "test") return split.test;
  throw ConfigError("unknown subset '" + subset + "' (use train|val|test|all)");
}

struct ScoreArgs {
  std::string checkpoint;
  std::string manifest;
  std::string config;
  std::string out;
  std::string subset = "test";
};

int run_score(const ScoreArgs& args) {
  TrainConfig config = args.config.empty() ? TrainConfig{} : read_train_config(args.config);
  if (const auto seed = env_seed_override()) config.seed = *seed;

  const ParameterStore params = load_checkpoint(args.checkpoint);
  // The checkpoint is the source of truth for the network layout.
  const ModelConfig stored = infer_model_config(params);
  config.model.encoder = stored.encoder;
  config.model.latent.law = stored.latent.law;

  const auto dataset = load_dataset(args.manifest);
  const auto manifest = read_manifest(args.manifest);
  const auto ids = ids_for_subset(manifest, args.subset);

  const auto result = evaluate(dataset, ids, params, config, false);
  write_score_csv(args.out, result.per_graph);
  std::cout << "scored " << ids.size() << " graphs into " << args.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string scores;
  std::string manifest;
  std::string out;
};

int run_eval(const EvalArgs& args) {
  const auto rows = read_score_csv(args.scores);
  if (rows.empty()) {
    throw DataError("score file " + args.scores + " has no rows");
  }
  const auto dataset = load_dataset(args.manifest);

  std::map<std::string, const WorkflowGraph*> by_id;
  for (const auto& graph : dataset) by_id.emplace(graph.id(), &graph);

  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(rows.size());
  for (const auto& row : rows) {
    const auto graph_it = by_id.find(row.graph_id);
    if (graph_it == by_id.end()) {
      throw DataError("scored graph '" + row.graph_id + "' is not in the manifest");
    }
    const WorkflowGraph& graph = *graph_it->second;
    const auto& node_ids = graph.node_ids();
    const auto node_it = std::find(node_ids.begin(), node_ids.end(), row.node_id);
    if (node_it == node_ids.end()) {
      throw DataError("scored node '" + row.node_id + "' is not in graph '" + row.graph_id + "'");
    }
    const auto node_index = static_cast<std::size_t>(node_it - node_ids.begin());
    scores.push_back(row.normalized_score);
    labels.push_back(graph.labels()[node_index]);
  }

  MetricSummary summary;
  summary.roc_auc = roc_auc(scores, labels);
  summary.average_precision = average_precision(scores, labels);
  for (const std::size_t k : {std::size_t{5}, std::size_t{10}, std::size_t{20}, scores.size()}) {
    if (k >= 1 && k <= scores.size()) {
      if (!summary.precision_at.empty() && summary.precision_at.back().k == k) continue;
      summary.precision_at.push_back({k, precision_at_k(scores, labels, k)});
    }
  }

  if (args.out.empty()) {
    nlohmann::ordered_json doc;
    doc["roc_auc"] = summary.roc_auc;
    doc["average_precision"] = summary.average_precision;
    nlohmann::ordered_json precision = nlohmann::ordered_json::object();
    for (const auto& entry : summary.precision_at) {
      precision[std::to_string(entry.k)] = entry.value;
    }
    doc["precision_at"] = precision;
    std::cout << doc.dump(2) << "\n";
  } else {
    write_metrics_json(args.out, summary);
    std::cout << "roc_auc=" << summary.roc_auc
              << " average_precision=" << summary.average_precision << " -> " << args.out << "\n";
  }
  return 0;
}

struct GridArgs {
  std::string manifest;
  std::vector<std::string> configs;
  std::string out_dir;
};

int run_grid(const GridArgs& args) {
  const auto dataset = load_dataset(args.manifest);
  const auto manifest = read_manifest(args.manifest);
  const auto split = manifest_split(manifest);

  bool labeled = true;
  for (const auto& graph : dataset) {
    if (!graph.has_labels()) labeled = false;
  }

  fs::create_directories(args.out_dir);
  std::ofstream summary(fs::path(args.out_dir) / "summary.csv");
  if (!summary) {
    throw IoError("cannot write grid summary in " + args.out_dir);
  }
  summary << "config,roc_auc,average_precision,precision_at_10\n";

  for (std::size_t i = 0; i < args.configs.size(); ++i) {
    TrainConfig config = read_train_config(args.configs[i]);
    if (const auto seed = env_seed_override()) config.seed = *seed;

    const auto result = train(dataset, split, config);
    const fs::path run_dir = fs::path(args.out_dir) / ("run" + std::to_string(i));
    fs::create_directories(run_dir);
    save_checkpoint(run_dir / "checkpoint.bin", result.params);
    write_train_log(run_dir / "train_log.jsonl", result.log);
    write_train_config(run_dir / "config.json", config);

    const auto eval = evaluate(dataset, split.test, result.params, config, labeled);
    write_score_csv(run_dir / "scores.csv", eval.per_graph);

    std::string auc = "n/a";
    std::string ap = "n/a";
    std::string p10 = "n/a";
    if (eval.metrics) {
      auc = std::to_string(eval.metrics->roc_auc);
      ap = std::to_string(eval.metrics->average_precision);
      for (const auto& [k, value] : eval.metrics->precision_at) {
        if (k == 10) p10 = std::to_string(value);
      }
      write_metrics_json(run_dir / "metrics.json", *eval.metrics);
    }
    summary << args.configs[i] << "," << auc << "," << ap << "," << p10 << "\n";
    std::cout << "run" << i << " (" << args.configs[i] << "): roc_auc=" << auc << "\n";
  }
  std::cout << "grid summary in " << (fs::path(args.out_dir) / "summary.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised anomaly detection for workflow DAGs"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  synth->add_option("--out", synth_args.out_dir, "Output dataset directory")->required();
  synth->add_option("--graphs", synth_args.graphs, "Number of DAG executions");
  synth->add_option("--levels", synth_args.levels, "DAG levels");
  synth->add_option("--width", synth_args.width, "Nodes per level");
  synth->add_option("--fan-in", synth_args.fan_in, "Parents per node");
  synth->add_option("--anomaly", synth_args.anomaly, "Anomaly class: mixed|cpu|hdd|none");
  synth->add_option("--severity", synth_args.severity, "Anomaly severity K");
  synth->add_option("--fraction", synth_args.fraction, "Fraction of anomalous nodes per graph");
  synth->add_option("--ratios", synth_args.ratios, "Train/val/test ratios")->expected(3);
  synth->add_option("--seed", synth_args.seed, "Master seed");
  synth->add_flag("--no-labels", synth_args.no_labels, "Omit label files");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a dataset manifest");
  train_cmd->add_option("--manifest", train_args.manifest, "Dataset manifest path")->required();
  train_cmd->add_option("--config", train_args.config, "Train config JSON (defaults otherwise)");
  train_cmd->add_option("--out-dir", train_args.out_dir, "Directory for checkpoint and log")
      ->required();

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a dataset with a trained checkpoint");
  score->add_option("--checkpoint", score_args.checkpoint, "Checkpoint path")->required();
  score->add_option("--manifest", score_args.manifest, "Dataset manifest path")->required();
  score->add_option("--config", score_args.config, "Scoring config JSON");
  score->add_option("--out", score_args.out, "Output score CSV path")->required();
  score->add_option("--subset", score_args.subset, "Graphs to score: train|val|test|all");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Compute metrics from a score CSV and labels");
  eval_cmd->add_option("--scores", eval_args.scores, "Score CSV path")->required();
  eval_cmd->add_option("--manifest", eval_args.manifest, "Dataset manifest path")->required();
  eval_cmd->add_option("--out", eval_args.out, "Metrics JSON path (stdout when omitted)");

  GridArgs grid_args;
  auto* grid = app.add_subcommand("grid", "Train and evaluate a list of config files");
  grid->add_option("--manifest", grid_args.manifest, "Dataset manifest path")->required();
  grid->add_option("--configs", grid_args.configs, "Train config JSON files")
      ->required()
      ->expected(-1);
  grid->add_option("--out-dir", grid_args.out_dir, "Directory for per-run artifacts")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (score->parsed()) return run_score(score_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (grid->parsed()) return run_grid(grid_args);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
