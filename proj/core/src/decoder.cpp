#include "flowsentry/decoder.hpp"

#include <cmath>

#include "flowsentry/error.hpp"
#include "flowsentry/optim.hpp"

namespace flowsentry {

namespace {

Tape::Var fetch(const std::map<std::string, Tape::Var>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) {
    throw BoundsError("missing parameter '" + name + "'");
  }
  return it->second;
}

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
  }
  return w;
}

}  // namespace

Tape::Var decode(Tape& tape, Tape::Var z, const std::map<std::string, Tape::Var>& params) {
  const Tape::Var hidden = tape.relu(tape.add_row(
      tape.matmul(z, fetch(params, "decoder.hidden.weight")), fetch(params, "decoder.hidden.bias")));
  return tape.add_row(tape.matmul(hidden, fetch(params, "decoder.output.weight")),
                      fetch(params, "decoder.output.bias"));
}

Matrix decode(const Matrix& z, const ParameterStore& params) {
  Tape tape;
  std::map<std::string, Tape::Var> vars;
  for (const auto& name : params.names()) {
    vars.emplace(name, tape.constant(params.value(name)));
  }
  return tape.value(decode(tape, tape.constant(z), vars));
}

void init_decoder_parameters(ParameterStore& params, int latent_dim, int hidden_dim,
                             int feature_dim, Rng& rng) {
  if (latent_dim < 1 || hidden_dim < 1 || feature_dim < 1) {
    throw ConfigError("decoder dimensions must be positive");
  }
  params.insert("decoder.hidden.weight", glorot(latent_dim, hidden_dim, rng));
  params.insert("decoder.hidden.bias", Matrix(1, hidden_dim));
  params.insert("decoder.output.weight", glorot(hidden_dim, feature_dim, rng));
  params.insert("decoder.output.bias", Matrix(1, feature_dim));
}

}  // namespace flowsentry
