#include "flowsentry/encoder.hpp"

#include <cmath>

#include "flowsentry/error.hpp"
#include "flowsentry/optim.hpp"

namespace flowsentry {

namespace {

void validate(const EncoderConfig& config) {
  if (config.num_layers < 1 || config.hidden_dim < 1 || config.latent_dim < 1) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (config.neighbor_sample < 0) {
    throw ConfigError("neighbor sample size must be non-negative");
  }
}

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
  }
  return w;
}

Tape::Var fetch(const std::map<std::string, Tape::Var>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) {
    throw BoundsError("missing parameter '" + name + "'");
  }
  return it->second;
}

std::string layer_prefix(int layer) { return "encoder.layer" + std::to_string(layer) + "."; }

}  // namespace

Tape::Var sage_layer(Tape& tape, Tape::Var h, const NeighborLists& neighbors,
                     Tape::Var self_weight, Tape::Var neighbor_weight, Tape::Var bias) {
  const Tape::Var self_term = tape.matmul(h, self_weight);
  const Tape::Var neigh_term = tape.matmul(tape.neighbor_mean(h, neighbors), neighbor_weight);
  return tape.relu(tape.add_row(tape.add(self_term, neigh_term), bias));
}

Matrix sage_layer(const Matrix& h, const WorkflowGraph& graph, const Matrix& self_weight,
                  const Matrix& neighbor_weight, const Matrix& bias) {
  Tape tape;
  const Tape::Var out =
      sage_layer(tape, tape.constant(h), graph.neighbor_lists(), tape.constant(self_weight),
                 tape.constant(neighbor_weight), tape.constant(bias));
  return tape.value(out);
}

EncoderOutput encode(Tape& tape, const NeighborLists& neighbors, Tape::Var x,
                     const EncoderConfig& config, bool with_log_var,
                     const std::map<std::string, Tape::Var>& params) {
  validate(config);
  Tape::Var h = x;
  for (int layer = 0; layer < config.num_layers; ++layer) {
    const std::string prefix = layer_prefix(layer);
    h = sage_layer(tape, h, neighbors, fetch(params, prefix + "self_weight"),
                   fetch(params, prefix + "neighbor_weight"), fetch(params, prefix + "bias"));
  }
  EncoderOutput out;
  out.latent = tape.add_row(tape.matmul(h, fetch(params, "encoder.latent_head.weight")),
                            fetch(params, "encoder.latent_head.bias"));
  if (with_log_var) {
    out.log_var = tape.add_row(tape.matmul(h, fetch(params, "encoder.logvar_head.weight")),
                               fetch(params, "encoder.logvar_head.bias"));
  }
  return out;
}

EncodedMatrices encode(const WorkflowGraph& graph, const Matrix& x_in, const EncoderConfig& config,
                       bool with_log_var, const ParameterStore& params) {
  Tape tape;
  std::map<std::string, Tape::Var> vars;
  for (const auto& name : params.names()) {
    vars.emplace(name, tape.constant(params.value(name)));
  }
  const EncoderOutput out =
      encode(tape, graph.neighbor_lists(), tape.constant(x_in), config, with_log_var, vars);
  EncodedMatrices result;
  result.latent = tape.value(out.latent);
  if (out.log_var) result.log_var = tape.value(*out.log_var);
  return result;
}

void init_encoder_parameters(ParameterStore& params, int feature_dim, const EncoderConfig& config,
                             bool with_log_var, Rng& rng) {
  validate(config);
  if (feature_dim < 1) {
    throw ConfigError("feature dimension must be positive");
  }
  int in_dim = feature_dim;
  for (int layer = 0; layer < config.num_layers; ++layer) {
    const std::string prefix = layer_prefix(layer);
    params.insert(prefix + "self_weight", glorot(in_dim, config.hidden_dim, rng));
    params.insert(prefix + "neighbor_weight", glorot(in_dim, config.hidden_dim, rng));
    params.insert(prefix + "bias", Matrix(1, config.hidden_dim));
    in_dim = config.hidden_dim;
  }
  params.insert("encoder.latent_head.weight", glorot(config.hidden_dim, config.latent_dim, rng));
  params.insert("encoder.latent_head.bias", Matrix(1, config.latent_dim));
  if (with_log_var) {
    params.insert("encoder.logvar_head.weight", glorot(config.hidden_dim, config.latent_dim, rng));
    params.insert("encoder.logvar_head.bias", Matrix(1, config.latent_dim));
  }
}

NeighborLists sample_neighbors(const WorkflowGraph& graph, int max_count, Rng& rng) {
  NeighborLists lists = graph.neighbor_lists();
  if (max_count <= 0) return lists;
  for (auto& nbrs : lists) {
    if (nbrs.size() <= static_cast<std::size_t>(max_count)) continue;
    // partial Fisher-Yates, then restore sorted order
    for (int i = 0; i < max_count; ++i) {
      const auto j = i + static_cast<int>(rng.bounded(nbrs.size() - i));
      std::swap(nbrs[i], nbrs[j]);
    }
    nbrs.resize(static_cast<std::size_t>(max_count));
    std::sort(nbrs.begin(), nbrs.end());
  }
  return lists;
}

}  // namespace flowsentry
