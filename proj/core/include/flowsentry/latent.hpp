#pragma once

#include "flowsentry/matrix.hpp"
#include "flowsentry/tape.hpp"

namespace flowsentry {

enum class LatentLaw {
  kNormal,
  kGumbel,
};

struct LatentConfig {
  LatentLaw law = LatentLaw::kNormal;
  /// Softmax temperature of the Gumbel relaxation.
  double temperature = 1.0;
  /// Offset inside log(-log(p + eps)).
  double gumbel_eps = 1e-10;
  /// Negates the noise, giving the conventional -log(-log(u)) Gumbel draw
  /// instead of the unnegated form used by default.
  bool standard_gumbel_sign = false;
};

/// Reparameterized Normal sample z = mu + exp(0.5 * log_var) ⊙ noise. The
/// noise enters as a constant, so gradients flow through mu and log_var only.
Tape::Var sample_normal(Tape& tape, Tape::Var mu, Tape::Var log_var, const Matrix& noise);
Matrix sample_normal(const Matrix& mu, const Matrix& log_var, const Matrix& noise);

/// Gumbel noise rho = log(-log(p + eps)) elementwise (negated under
/// standard_gumbel_sign). NumericError when p + eps >= 1 or p < 0.
Matrix gumbel_noise(const Matrix& p, const LatentConfig& config);

/// Gumbel-softmax sample: rows of softmax((rho + logits) / t). Each output
/// row is non-negative and sums to 1.
Tape::Var sample_gumbel(Tape& tape, Tape::Var logits, const Matrix& uniform_p,
                        const LatentConfig& config);
Matrix sample_gumbel(const Matrix& logits, const Matrix& uniform_p, const LatentConfig& config);

}  // namespace flowsentry
