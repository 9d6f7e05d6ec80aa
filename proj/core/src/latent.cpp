#include "flowsentry/latent.hpp"

#include <cmath>
#include <string>

#include "flowsentry/error.hpp"

namespace flowsentry {

Tape::Var sample_normal(Tape& tape, Tape::Var mu, Tape::Var log_var, const Matrix& noise) {
  const Tape::Var sigma = tape.exp(tape.scale(log_var, 0.5));
  return tape.add(mu, tape.mul(sigma, tape.constant(noise)));
}

Matrix sample_normal(const Matrix& mu, const Matrix& log_var, const Matrix& noise) {
  Tape tape;
  return tape.value(sample_normal(tape, tape.constant(mu), tape.constant(log_var), noise));
}

Matrix gumbel_noise(const Matrix& p, const LatentConfig& config) {
  if (!(config.gumbel_eps > 0.0)) {
    throw ConfigError("gumbel eps must be positive");
  }
  Matrix rho(p.rows(), p.cols());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double shifted = p.data()[i] + config.gumbel_eps;
    if (p.data()[i] < 0.0 || shifted >= 1.0) {
      throw NumericError("gumbel draw p + eps outside (0,1): p = " + std::to_string(p.data()[i]));
    }
    const double value = std::log(-std::log(shifted));
    rho.data()[i] = config.standard_gumbel_sign ? -value : value;
  }
  ensure_finite(rho, "gumbel_noise");
  return rho;
}

Tape::Var sample_gumbel(Tape& tape, Tape::Var logits, const Matrix& uniform_p,
                        const LatentConfig& config) {
  if (!(config.temperature > 0.0)) {
    throw ConfigError("temperature must be positive");
  }
  const Matrix rho = gumbel_noise(uniform_p, config);
  const Tape::Var shifted = tape.add(tape.constant(rho), logits);
  return tape.row_softmax(tape.scale(shifted, 1.0 / config.temperature));
}

Matrix sample_gumbel(const Matrix& logits, const Matrix& uniform_p, const LatentConfig& config) {
  Tape tape;
  return tape.value(sample_gumbel(tape, tape.constant(logits), uniform_p, config));
}

}  // namespace flowsentry
