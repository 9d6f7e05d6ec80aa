#include "flowsentry/model.hpp"

#include <algorithm>

#include "flowsentry/error.hpp"

namespace flowsentry {

ParameterStore init_model_parameters(int feature_dim, const ModelConfig& config,
                                     std::uint64_t seed) {
  ParameterStore params;
  Rng rng(derive_seed(seed, "init"));
  const bool with_log_var = config.latent.law == LatentLaw::kNormal;
  init_encoder_parameters(params, feature_dim, config.encoder, with_log_var, rng);
  init_decoder_parameters(params, config.encoder.latent_dim, config.encoder.hidden_dim,
                          feature_dim, rng);
  return params;
}

std::map<std::string, Tape::Var> register_parameters(Tape& tape, const ParameterStore& params) {
  std::map<std::string, Tape::Var> vars;
  for (const auto& name : params.names()) {
    vars.emplace(name, tape.leaf(params.value(name)));
  }
  return vars;
}

Matrix draw_latent_noise(std::size_t rows, std::size_t cols, const LatentConfig& config,
                         Rng& rng) {
  Matrix noise(rows, cols);
  if (config.law == LatentLaw::kNormal) {
    for (std::size_t i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();
  } else {
    const double cap = 1.0 - 2.0 * config.gumbel_eps;
    for (std::size_t i = 0; i < noise.size(); ++i) {
      noise.data()[i] = std::min(rng.uniform(), cap);
    }
  }
  return noise;
}

namespace {

Tape::Var sample_view(Tape& tape, const EncoderOutput& encoded, const Matrix& noise,
                      const LatentConfig& config) {
  if (config.law == LatentLaw::kNormal) {
    if (!encoded.log_var) {
      throw ShapeError("Normal latent law requires a log-variance head");
    }
    return sample_normal(tape, encoded.latent, *encoded.log_var, noise);
  }
  return sample_gumbel(tape, encoded.latent, noise, config);
}

}  // namespace

Tape::Var graph_total_loss(Tape& tape, const GraphLossInputs& inputs, const ModelConfig& config,
                           const std::map<std::string, Tape::Var>& params,
                           const NeighborLists* neighbor_override) {
  const WorkflowGraph& graph = *inputs.graph;
  const NeighborLists& neighbors =
      neighbor_override != nullptr ? *neighbor_override : graph.neighbor_lists();
  const bool with_log_var = config.latent.law == LatentLaw::kNormal;

  const Tape::Var x = tape.constant(graph.features());
  const Tape::Var x_aug = tape.constant(inputs.augmentation.x_prime);

  const EncoderOutput enc_orig = encode(tape, neighbors, x, config.encoder, with_log_var, params);
  const EncoderOutput enc_aug =
      encode(tape, neighbors, x_aug, config.encoder, with_log_var, params);

  const Tape::Var z = sample_view(tape, enc_orig, inputs.noise_original, config.latent);
  const Tape::Var z_prime = sample_view(tape, enc_aug, inputs.noise_augmented, config.latent);

  const Tape::Var x_hat = decode(tape, z, params);
  return total_loss(tape, x_hat, x, z, z_prime, inputs.augmentation.y_prime, config.loss);
}

double graph_total_loss_value(const GraphLossInputs& inputs, const ModelConfig& config,
                              const ParameterStore& params) {
  Tape tape;
  std::map<std::string, Tape::Var> vars;
  for (const auto& name : params.names()) {
    vars.emplace(name, tape.constant(params.value(name)));
  }
  return tape.value(graph_total_loss(tape, inputs, config, vars))(0, 0);
}

std::vector<double> score_graph(const WorkflowGraph& graph, const ParameterStore& params,
                                const ModelConfig& config, std::uint64_t seed) {
  AugmentConfig augment_config = config.augment;
  augment_config.seed = derive_seed(seed, "score_augment");
  const AugmentationResult augmentation = augment(graph, augment_config);

  const bool with_log_var = config.latent.law == LatentLaw::kNormal;
  const EncodedMatrices enc_orig =
      encode(graph, graph.features(), config.encoder, with_log_var, params);
  const EncodedMatrices enc_aug =
      encode(graph, augmentation.x_prime, config.encoder, with_log_var, params);

  const auto n = graph.node_count();
  const auto k = static_cast<std::size_t>(config.encoder.latent_dim);
  Rng noise_rng(derive_seed(seed, "score_noise"));
  const Matrix noise_orig = draw_latent_noise(n, k, config.latent, noise_rng);
  const Matrix noise_aug = draw_latent_noise(n, k, config.latent, noise_rng);

  Matrix z;
  Matrix z_prime;
  if (config.latent.law == LatentLaw::kNormal) {
    z = sample_normal(enc_orig.latent, *enc_orig.log_var, noise_orig);
    z_prime = sample_normal(enc_aug.latent, *enc_aug.log_var, noise_aug);
  } else {
    z = sample_gumbel(enc_orig.latent, noise_orig, config.latent);
    z_prime = sample_gumbel(enc_aug.latent, noise_aug, config.latent);
  }

  const Matrix x_hat = decode(z, params);
  return anomaly_scores(x_hat, graph.features(), z, z_prime, augmentation.y_prime, config.loss);
}

ModelConfig infer_model_config(const ParameterStore& params) {
  ModelConfig config;
  int layers = 0;
  while (params.contains("encoder.layer" + std::to_string(layers) + ".self_weight")) {
    ++layers;
  }
  if (layers == 0 || !params.contains("encoder.latent_head.weight") ||
      !params.contains("decoder.hidden.weight")) {
    throw FormatError("parameter store does not contain a complete model");
  }
  config.encoder.num_layers = layers;
  config.encoder.hidden_dim =
      static_cast<int>(params.value("encoder.layer0.self_weight").cols());
  config.encoder.latent_dim = static_cast<int>(params.value("encoder.latent_head.weight").cols());
  config.latent.law =
      params.contains("encoder.logvar_head.weight") ? LatentLaw::kNormal : LatentLaw::kGumbel;
  return config;
}

}  // namespace flowsentry
