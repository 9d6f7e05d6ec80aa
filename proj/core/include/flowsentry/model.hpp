#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "flowsentry/augment.hpp"
#include "flowsentry/decoder.hpp"
#include "flowsentry/encoder.hpp"
#include "flowsentry/latent.hpp"
#include "flowsentry/loss.hpp"
#include "flowsentry/optim.hpp"

namespace flowsentry {

/// Everything needed to run the model on one graph: augmentation policy,
/// encoder shape, latent law, and loss weights.
struct ModelConfig {
  AugmentConfig augment;
  EncoderConfig encoder;
  LatentConfig latent;
  LossConfig loss;
};

/// Fresh Glorot-initialized encoder and decoder parameters.
ParameterStore init_model_parameters(int feature_dim, const ModelConfig& config,
                                     std::uint64_t seed);

/// Registers every parameter as a gradient-tracked leaf on the tape.
std::map<std::string, Tape::Var> register_parameters(Tape& tape, const ParameterStore& params);

/// One noise matrix per view: standard normal draws for the Normal law,
/// uniforms in [0, 1 - 2*eps] for the Gumbel law (the clamp keeps
/// log(-log(p + eps)) finite).
Matrix draw_latent_noise(std::size_t rows, std::size_t cols, const LatentConfig& config, Rng& rng);

struct GraphLossInputs {
  const WorkflowGraph* graph = nullptr;
  AugmentationResult augmentation;
  Matrix noise_original;   // n x latent_dim
  Matrix noise_augmented;  // n x latent_dim
};

/// Full training objective for one graph: encode both views, sample both
/// latents, decode the original view, combine reconstruction and margin.
Tape::Var graph_total_loss(Tape& tape, const GraphLossInputs& inputs, const ModelConfig& config,
                           const std::map<std::string, Tape::Var>& params,
                           const NeighborLists* neighbor_override = nullptr);

/// Value-level loss (no gradients) for validation tracking.
double graph_total_loss_value(const GraphLossInputs& inputs, const ModelConfig& config,
                              const ParameterStore& params);

/// Scoring-time forward: one seeded augmentation pass supplies z' and y',
/// then per-node anomaly scores are computed from the reconstruction of the
/// original view.
std::vector<double> score_graph(const WorkflowGraph& graph, const ParameterStore& params,
                                const ModelConfig& config, std::uint64_t seed);

/// Reads the encoder layout (layer count, dimensions, latent law) back from
/// checkpointed parameter shapes.
ModelConfig infer_model_config(const ParameterStore& params);

}  // namespace flowsentry
