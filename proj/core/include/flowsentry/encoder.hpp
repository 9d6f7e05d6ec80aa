#pragma once

#include <map>
#include <optional>
#include <string>

#include "flowsentry/graph.hpp"
#include "flowsentry/rng.hpp"
#include "flowsentry/tape.hpp"

namespace flowsentry {

struct EncoderConfig {
  int num_layers = 2;
  int hidden_dim = 32;
  int latent_dim = 16;
  /// Fixed-size uniform neighbor subsample per node; 0 aggregates the full
  /// neighborhood.
  int neighbor_sample = 0;
};

/// out[u] = relu(H[u] * W_self + mean_{v in N(u)} H[v] * W_neigh + b).
/// Isolated nodes contribute a zero neighbor mean. Weights are (in x out),
/// bias is 1 x out.
Tape::Var sage_layer(Tape& tape, Tape::Var h, const NeighborLists& neighbors,
                     Tape::Var self_weight, Tape::Var neighbor_weight, Tape::Var bias);

/// Value-level convenience over a scratch tape.
Matrix sage_layer(const Matrix& h, const WorkflowGraph& graph, const Matrix& self_weight,
                  const Matrix& neighbor_weight, const Matrix& bias);

struct EncoderOutput {
  Tape::Var latent;                 // n x latent_dim logits (Gumbel) or mean (Normal)
  std::optional<Tape::Var> log_var; // second head, Normal law only
};

/// Stacked sage layers followed by one (or, with log-variance, two) linear
/// heads. Parameter names follow init_encoder_parameters().
EncoderOutput encode(Tape& tape, const NeighborLists& neighbors, Tape::Var x,
                     const EncoderConfig& config, bool with_log_var,
                     const std::map<std::string, Tape::Var>& params);

struct EncodedMatrices {
  Matrix latent;
  std::optional<Matrix> log_var;
};

/// Deterministic forward pass over full neighborhoods.
EncodedMatrices encode(const WorkflowGraph& graph, const Matrix& x_in, const EncoderConfig& config,
                       bool with_log_var, const class ParameterStore& params);

/// Glorot-uniform initialization of all encoder parameters into `params`.
void init_encoder_parameters(class ParameterStore& params, int feature_dim,
                             const EncoderConfig& config, bool with_log_var, Rng& rng);

/// Per-node neighbor lists capped at `max_count` by uniform subsampling;
/// lists at or under the cap are kept whole.
NeighborLists sample_neighbors(const WorkflowGraph& graph, int max_count, Rng& rng);

}  // namespace flowsentry
