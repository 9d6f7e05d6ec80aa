#include "flowsentry/dataset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "flowsentry/error.hpp"
#include "flowsentry/rng.hpp"

namespace flowsentry {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text, const std::string& context) {
  if (text.empty()) {
    throw DataError("missing value in " + context);
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw DataError("cannot parse number '" + text + "' in " + context);
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

json parse_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw FormatError("invalid JSON in " + path.string());
  }
  return doc;
}

void require_keys(const json& object, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  for (const auto& [key, _] : object.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

}  // namespace

DatasetManifest read_manifest(const fs::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_object()) {
    throw FormatError("manifest must be a JSON object: " + path.string());
  }
  require_keys(doc, {"version", "features", "graphs", "split"}, "manifest");
  DatasetManifest manifest;
  manifest.version = doc.value("version", 1);
  if (manifest.version != 1) {
    throw FormatError("unsupported manifest version " + std::to_string(manifest.version));
  }
  if (!doc.contains("features") || !doc["features"].is_array() || doc["features"].empty()) {
    throw FormatError("manifest needs a non-empty feature array");
  }
  for (const auto& item : doc["features"]) {
    require_keys(item, {"name", "timestamp"}, "manifest feature");
    FeatureColumn column;
    column.name = item.at("name").get<std::string>();
    column.timestamp = item.value("timestamp", false);
    manifest.features.push_back(std::move(column));
  }
  if (!doc.contains("graphs") || !doc["graphs"].is_array() || doc["graphs"].empty()) {
    throw FormatError("manifest needs a non-empty graph array");
  }
  for (const auto& item : doc["graphs"]) {
    require_keys(item, {"id", "nodes", "edges", "labels"}, "manifest graph");
    ManifestEntry entry;
    entry.id = item.at("id").get<std::string>();
    entry.nodes_path = item.at("nodes").get<std::string>();
    entry.edges_path = item.at("edges").get<std::string>();
    entry.labels_path = item.value("labels", std::string{});
    manifest.graphs.push_back(std::move(entry));
  }
  if (doc.contains("split")) {
    require_keys(doc["split"], {"ratios", "seed"}, "manifest split");
    const auto& split = doc["split"];
    if (split.contains("ratios")) {
      const auto ratios = split["ratios"].get<std::vector<double>>();
      if (ratios.size() != 3) {
        throw FormatError("split ratios must have three entries");
      }
      manifest.split_ratios = {ratios[0], ratios[1], ratios[2]};
    }
    manifest.split_seed = split.value("seed", std::uint64_t{0});
  }
  return manifest;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  json doc;
  doc["version"] = manifest.version;
  doc["features"] = json::array();
  for (const auto& column : manifest.features) {
    json item;
    item["name"] = column.name;
    if (column.timestamp) item["timestamp"] = true;
    doc["features"].push_back(std::move(item));
  }
  doc["graphs"] = json::array();
  for (const auto& entry : manifest.graphs) {
    json item;
    item["id"] = entry.id;
    item["nodes"] = entry.nodes_path;
    item["edges"] = entry.edges_path;
    if (!entry.labels_path.empty()) item["labels"] = entry.labels_path;
    doc["graphs"].push_back(std::move(item));
  }
  doc["split"] = {{"ratios", manifest.split_ratios}, {"seed", manifest.split_seed}};
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << doc.dump(2) << "\n";
}

DatasetSplit manifest_split(const DatasetManifest& manifest) {
  std::vector<std::string> ids;
  ids.reserve(manifest.graphs.size());
  for (const auto& entry : manifest.graphs) ids.push_back(entry.id);
  return split_dataset(ids, manifest.split_ratios, manifest.split_seed);
}

WorkflowGraph assemble_graph(const std::string& id, const Matrix& raw_adjacency,
                             const Matrix& raw_features, std::vector<std::string> node_ids,
                             std::optional<std::vector<std::uint8_t>> labels,
                             const std::vector<FeatureColumn>& schema) {
  if (raw_features.cols() != schema.size()) {
    throw SchemaError("graph '" + id + "' has " + std::to_string(raw_features.cols()) +
                      " feature columns, schema expects " + std::to_string(schema.size()));
  }
  if (!is_acyclic(raw_adjacency)) {
    throw DataError("graph '" + id + "' contains a cycle in its raw edges");
  }
  std::vector<std::size_t> timestamp_columns;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].timestamp) timestamp_columns.push_back(j);
  }
  // Non-finite values are rejected here (inside normalize_columns) rather
  // than imputed.
  const Matrix features =
      normalize_columns(shift_columns_to_zero(raw_features, timestamp_columns));
  return WorkflowGraph(id, symmetrize(raw_adjacency), features, std::move(node_ids),
                       std::move(labels));
}

namespace {

struct ParsedNodes {
  std::vector<std::string> node_ids;
  Matrix features;
};

ParsedNodes parse_nodes_csv(const fs::path& path, const std::vector<FeatureColumn>& schema) {
  const auto lines = read_lines(path);
  if (lines.empty()) {
    throw FormatError("empty nodes file " + path.string());
  }
  std::string expected_header = "node_id";
  for (const auto& column : schema) expected_header += "," + column.name;
  if (lines[0] != expected_header) {
    throw SchemaError("nodes header in " + path.string() + " is '" + lines[0] + "', expected '" +
                      expected_header + "'");
  }
  ParsedNodes parsed;
  const std::size_t n = lines.size() - 1;
  parsed.features = Matrix(n, schema.size());
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = split_csv_line(lines[i + 1]);
    if (fields.size() != schema.size() + 1) {
      throw FormatError("row " + std::to_string(i + 1) + " of " + path.string() + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(schema.size() + 1));
    }
    if (!seen.emplace(fields[0], i).second) {
      throw DataError("duplicate node id '" + fields[0] + "' in " + path.string());
    }
    parsed.node_ids.push_back(fields[0]);
    for (std::size_t j = 0; j < schema.size(); ++j) {
      parsed.features(i, j) =
          parse_double(fields[j + 1], path.string() + " row " + std::to_string(i + 1));
    }
  }
  return parsed;
}

Matrix parse_edges_csv(const fs::path& path, const std::vector<std::string>& node_ids) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "src,dst") {
    throw FormatError("edges file " + path.string() + " must start with header 'src,dst'");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < node_ids.size(); ++i) index.emplace(node_ids[i], i);
  Matrix adjacency(node_ids.size(), node_ids.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2) {
      throw FormatError("edge row " + std::to_string(i) + " of " + path.string() +
                        " needs exactly src,dst");
    }
    const auto src = index.find(fields[0]);
    const auto dst = index.find(fields[1]);
    if (src == index.end() || dst == index.end()) {
      throw DataError("edge row " + std::to_string(i) + " of " + path.string() +
                      " references an unknown node id");
    }
    if (src->second == dst->second) continue;  // self-loops dropped
    adjacency(src->second, dst->second) = 1.0;
  }
  return adjacency;
}

std::vector<std::uint8_t> parse_labels_csv(const fs::path& path,
                                           const std::vector<std::string>& node_ids) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "node_id,label") {
    throw FormatError("labels file " + path.string() + " must start with header 'node_id,label'");
  }
  std::map<std::string, std::uint8_t> by_id;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2) {
      throw FormatError("label row " + std::to_string(i) + " of " + path.string() +
                        " needs exactly node_id,label");
    }
    if (fields[1] != "0" && fields[1] != "1") {
      throw DataError("label for node '" + fields[0] + "' must be 0 or 1");
    }
    if (!by_id.emplace(fields[0], fields[1] == "1" ? 1 : 0).second) {
      throw DataError("duplicate label for node '" + fields[0] + "' in " + path.string());
    }
  }
  std::vector<std::uint8_t> labels;
  labels.reserve(node_ids.size());
  for (const auto& id : node_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw DataError("node '" + id + "' is missing from " + path.string());
    }
    labels.push_back(it->second);
  }
  if (by_id.size() != node_ids.size()) {
    throw DataError("labels file " + path.string() + " lists unknown nodes");
  }
  return labels;
}

}  // namespace

std::vector<WorkflowGraph> load_dataset(const fs::path& manifest_path) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  std::vector<WorkflowGraph> graphs;
  graphs.reserve(manifest.graphs.size());
  for (const auto& entry : manifest.graphs) {
    const ParsedNodes nodes = parse_nodes_csv(base / entry.nodes_path, manifest.features);
    const Matrix raw_adjacency = parse_edges_csv(base / entry.edges_path, nodes.node_ids);
    std::optional<std::vector<std::uint8_t>> labels;
    if (!entry.labels_path.empty()) {
      labels = parse_labels_csv(base / entry.labels_path, nodes.node_ids);
    }
    graphs.push_back(assemble_graph(entry.id, raw_adjacency, nodes.features, nodes.node_ids,
                                    std::move(labels), manifest.features));
  }
  return graphs;
}

void write_graph_files(const fs::path& dataset_dir, const ManifestEntry& entry,
                       const SynthGraph& graph, const std::vector<FeatureColumn>& schema) {
  if (graph.features.cols() != schema.size()) {
    throw SchemaError("generated graph feature count does not match schema");
  }
  const fs::path nodes_path = dataset_dir / entry.nodes_path;
  const fs::path edges_path = dataset_dir / entry.edges_path;
  fs::create_directories(nodes_path.parent_path());
  fs::create_directories(edges_path.parent_path());

  std::ofstream nodes(nodes_path);
  if (!nodes) {
    throw IoError("cannot write " + nodes_path.string());
  }
  nodes << "node_id";
  for (const auto& column : schema) nodes << "," << column.name;
  nodes << "\n";
  for (std::size_t i = 0; i < graph.node_ids.size(); ++i) {
    nodes << graph.node_ids[i];
    for (std::size_t j = 0; j < graph.features.cols(); ++j) {
      nodes << "," << format_double(graph.features(i, j));
    }
    nodes << "\n";
  }

  std::ofstream edges(edges_path);
  if (!edges) {
    throw IoError("cannot write " + edges_path.string());
  }
  edges << "src,dst\n";
  for (std::size_t i = 0; i < graph.raw_adjacency.rows(); ++i) {
    for (std::size_t j = 0; j < graph.raw_adjacency.cols(); ++j) {
      if (graph.raw_adjacency(i, j) != 0.0) {
        edges << graph.node_ids[i] << "," << graph.node_ids[j] << "\n";
      }
    }
  }

  if (!entry.labels_path.empty()) {
    const fs::path labels_path = dataset_dir / entry.labels_path;
    fs::create_directories(labels_path.parent_path());
    std::ofstream labels(labels_path);
    if (!labels) {
      throw IoError("cannot write " + labels_path.string());
    }
    labels << "node_id,label\n";
    for (std::size_t i = 0; i < graph.node_ids.size(); ++i) {
      labels << graph.node_ids[i] << "," << static_cast<int>(graph.labels[i]) << "\n";
    }
  }
}

std::pair<DatasetManifest, std::vector<SynthGraph>> make_synthetic_dataset(
    const SynthDatasetOptions& options) {
  if (options.graph_count < 1) {
    throw ConfigError("dataset needs at least one graph");
  }
  DatasetManifest manifest;
  for (const auto& name : synth_feature_names()) {
    manifest.features.push_back({name, name == "timestamp"});
  }
  manifest.split_ratios = options.split_ratios;
  manifest.split_seed = derive_seed(options.base.seed, "split");

  std::vector<SynthGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(options.graph_count));
  for (int i = 0; i < options.graph_count; ++i) {
    SynthConfig config = options.base;
    config.seed = derive_seed(options.base.seed, "graph", static_cast<std::uint64_t>(i));
    if (!options.rotation.empty()) {
      config.anomaly = options.rotation[static_cast<std::size_t>(i) % options.rotation.size()];
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "g%03d", i);
    ManifestEntry entry;
    entry.id = buf;
    entry.nodes_path = std::string(buf) + "/nodes.csv";
    entry.edges_path = std::string(buf) + "/edges.csv";
    entry.labels_path = std::string(buf) + "/labels.csv";
    manifest.graphs.push_back(std::move(entry));
    graphs.push_back(generate_synthetic(config));
  }
  return {std::move(manifest), std::move(graphs)};
}

std::vector<WorkflowGraph> preprocess_synthetic(const DatasetManifest& manifest,
                                                const std::vector<SynthGraph>& graphs) {
  if (manifest.graphs.size() != graphs.size()) {
    throw ShapeError("manifest and graph list differ in length");
  }
  std::vector<WorkflowGraph> out;
  out.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    out.push_back(assemble_graph(manifest.graphs[i].id, graphs[i].raw_adjacency,
                                 graphs[i].features, graphs[i].node_ids, graphs[i].labels,
                                 manifest.features));
  }
  return out;
}

void write_score_csv(const fs::path& path, const std::vector<GraphScores>& reports) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "graph_id,node_id,raw_score,normalized_score,decision,rank\n";
  for (const auto& entry : reports) {
    const auto& report = entry.report;
    std::vector<int> rank_of(report.ranking.size());
    for (std::size_t pos = 0; pos < report.ranking.size(); ++pos) {
      rank_of[static_cast<std::size_t>(report.ranking[pos])] = static_cast<int>(pos) + 1;
    }
    for (std::size_t i = 0; i < report.raw_scores.size(); ++i) {
      out << entry.graph_id << "," << entry.node_ids[i] << ","
          << format_double(report.raw_scores[i]) << ","
          << format_double(report.normalized_scores[i]) << ","
          << static_cast<int>(report.decisions[i]) << "," << rank_of[i] << "\n";
    }
  }
}

std::vector<ScoreRow> read_score_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "graph_id,node_id,raw_score,normalized_score,decision,rank") {
    throw FormatError("score file " + path.string() + " has an unexpected header");
  }
  std::vector<ScoreRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 6) {
      throw FormatError("score row " + std::to_string(i) + " has " +
                        std::to_string(fields.size()) + " fields, expected 6");
    }
    ScoreRow row;
    row.graph_id = fields[0];
    row.node_id = fields[1];
    row.raw_score = parse_double(fields[2], "score row " + std::to_string(i));
    row.normalized_score = parse_double(fields[3], "score row " + std::to_string(i));
    row.decision = fields[4] == "1" ? 1 : 0;
    if (fields[4] != "0" && fields[4] != "1") {
      throw DataError("decision must be 0 or 1 in score row " + std::to_string(i));
    }
    row.rank = static_cast<int>(parse_double(fields[5], "score row " + std::to_string(i)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_train_log(const fs::path& path, const TrainLog& log) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  for (const auto& record : log.epochs) {
    json line;
    line["epoch"] = record.epoch;
    line["train_loss"] = record.train_loss;
    line["val_loss"] = record.val_loss;
    if (record.val_roc_auc) line["val_roc_auc"] = *record.val_roc_auc;
    if (record.val_average_precision) line["val_average_precision"] = *record.val_average_precision;
    if (record.val_precision_at_10) line["val_precision_at_10"] = *record.val_precision_at_10;
    out << line.dump() << "\n";
  }
}

void write_metrics_json(const fs::path& path, const MetricSummary& summary) {
  json doc;
  doc["roc_auc"] = summary.roc_auc;
  doc["average_precision"] = summary.average_precision;
  json precision = json::object();
  for (const auto& entry : summary.precision_at) {
    precision[std::to_string(entry.k)] = entry.value;
  }
  doc["precision_at"] = std::move(precision);
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << doc.dump(2) << "\n";
}

namespace {

LatentLaw latent_law_from_string(const std::string& name) {
  if (name == "normal") return LatentLaw::kNormal;
  if (name == "gumbel") return LatentLaw::kGumbel;
  throw ConfigError("unknown latent law '" + name + "'");
}

const char* to_string(LatentLaw law) {
  return law == LatentLaw::kNormal ? "normal" : "gumbel";
}

}  // namespace

TrainConfig read_train_config(const fs::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_object()) {
    throw FormatError("train config must be a JSON object: " + path.string());
  }
  require_keys(doc,
               {"epochs", "batch_size", "learning_rate", "weight_decay", "seed", "latent",
                "augment", "encoder", "loss", "score"},
               "train config");
  TrainConfig config;
  config.epochs = doc.value("epochs", config.epochs);
  config.batch_size = doc.value("batch_size", config.batch_size);
  config.learning_rate = doc.value("learning_rate", config.learning_rate);
  config.weight_decay = doc.value("weight_decay", config.weight_decay);
  config.seed = doc.value("seed", config.seed);
  if (doc.contains("latent")) {
    const auto& section = doc["latent"];
    require_keys(section, {"law", "temperature", "gumbel_eps", "standard_gumbel_sign"},
                 "latent config");
    if (section.contains("law")) {
      config.model.latent.law = latent_law_from_string(section["law"].get<std::string>());
    }
    config.model.latent.temperature =
        section.value("temperature", config.model.latent.temperature);
    config.model.latent.gumbel_eps = section.value("gumbel_eps", config.model.latent.gumbel_eps);
    config.model.latent.standard_gumbel_sign =
        section.value("standard_gumbel_sign", config.model.latent.standard_gumbel_sign);
  }
  if (doc.contains("augment")) {
    const auto& section = doc["augment"];
    require_keys(section, {"selection_rate", "scale_factor", "strict_mask_band"},
                 "augment config");
    config.model.augment.selection_rate =
        section.value("selection_rate", config.model.augment.selection_rate);
    config.model.augment.scale_factor =
        section.value("scale_factor", config.model.augment.scale_factor);
    config.model.augment.strict_mask_band =
        section.value("strict_mask_band", config.model.augment.strict_mask_band);
  }
  if (doc.contains("encoder")) {
    const auto& section = doc["encoder"];
    require_keys(section, {"num_layers", "hidden_dim", "latent_dim", "neighbor_sample"},
                 "encoder config");
    config.model.encoder.num_layers =
        section.value("num_layers", config.model.encoder.num_layers);
    config.model.encoder.hidden_dim =
        section.value("hidden_dim", config.model.encoder.hidden_dim);
    config.model.encoder.latent_dim =
        section.value("latent_dim", config.model.encoder.latent_dim);
    config.model.encoder.neighbor_sample =
        section.value("neighbor_sample", config.model.encoder.neighbor_sample);
  }
  if (doc.contains("loss")) {
    const auto& section = doc["loss"];
    require_keys(section, {"eta", "margin"}, "loss config");
    config.model.loss.eta = section.value("eta", config.model.loss.eta);
    config.model.loss.margin = section.value("margin", config.model.loss.margin);
  }
  if (doc.contains("score")) {
    const auto& section = doc["score"];
    require_keys(section, {"threshold", "normalize_scores"}, "score config");
    config.score.threshold = section.value("threshold", config.score.threshold);
    config.score.normalize_scores =
        section.value("normalize_scores", config.score.normalize_scores);
  }
  return config;
}

void write_train_config(const fs::path& path, const TrainConfig& config) {
  json doc;
  doc["epochs"] = config.epochs;
  doc["batch_size"] = config.batch_size;
  doc["learning_rate"] = config.learning_rate;
  doc["weight_decay"] = config.weight_decay;
  doc["seed"] = config.seed;
  doc["latent"] = {{"law", to_string(config.model.latent.law)},
                   {"temperature", config.model.latent.temperature},
                   {"gumbel_eps", config.model.latent.gumbel_eps},
                   {"standard_gumbel_sign", config.model.latent.standard_gumbel_sign}};
  doc["augment"] = {{"selection_rate", config.model.augment.selection_rate},
                    {"scale_factor", config.model.augment.scale_factor},
                    {"strict_mask_band", config.model.augment.strict_mask_band}};
  doc["encoder"] = {{"num_layers", config.model.encoder.num_layers},
                    {"hidden_dim", config.model.encoder.hidden_dim},
                    {"latent_dim", config.model.encoder.latent_dim},
                    {"neighbor_sample", config.model.encoder.neighbor_sample}};
  doc["loss"] = {{"eta", config.model.loss.eta}, {"margin", config.model.loss.margin}};
  doc["score"] = {{"threshold", config.score.threshold},
                  {"normalize_scores", config.score.normalize_scores}};
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << doc.dump(2) << "\n";
}

}  // namespace flowsentry
