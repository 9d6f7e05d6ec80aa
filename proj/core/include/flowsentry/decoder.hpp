#pragma once

#include <map>
#include <string>

#include "flowsentry/rng.hpp"
#include "flowsentry/tape.hpp"

namespace flowsentry {

/// Two-layer perceptron latent_dim -> hidden_dim -> feature_dim with a
/// rectifier between layers and a linear output. Applied to the latent of
/// the original view only.
Tape::Var decode(Tape& tape, Tape::Var z, const std::map<std::string, Tape::Var>& params);
Matrix decode(const Matrix& z, const class ParameterStore& params);

void init_decoder_parameters(class ParameterStore& params, int latent_dim, int hidden_dim,
                             int feature_dim, Rng& rng);

}  // namespace flowsentry
