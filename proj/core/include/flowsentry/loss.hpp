#pragma once

#include <cstdint>
#include <vector>

#include "flowsentry/matrix.hpp"
#include "flowsentry/tape.hpp"

namespace flowsentry {

struct LossConfig {
  /// Weight of the reconstruction term; the margin term gets 1 - eta.
  double eta = 0.5;
  /// Hinge margin lambda.
  double margin = 1.0;
};

/// Frobenius norm of the reconstruction error, ||X_hat - X||_F.
Tape::Var reconstruction_loss(Tape& tape, Tape::Var x_hat, Tape::Var x);
double reconstruction_loss(const Matrix& x_hat, const Matrix& x);

/// Mean over nodes of the per-node hinge max(0, -s_i * d_i + lambda), where
/// s_i = 2 y'_i - 1 and d_i = ||z_i - z'_i||_2. Perturbed nodes (y' = 1) are
/// pushed at least lambda apart; unperturbed nodes are pulled together.
Tape::Var margin_loss(Tape& tape, Tape::Var z, Tape::Var z_prime,
                      const std::vector<std::uint8_t>& y_prime, double lambda);
double margin_loss(const Matrix& z, const Matrix& z_prime,
                   const std::vector<std::uint8_t>& y_prime, double lambda);

/// eta * reconstruction + (1 - eta) * margin.
Tape::Var total_loss(Tape& tape, Tape::Var x_hat, Tape::Var x, Tape::Var z, Tape::Var z_prime,
                     const std::vector<std::uint8_t>& y_prime, const LossConfig& config);
double total_loss(const Matrix& x_hat, const Matrix& x, const Matrix& z, const Matrix& z_prime,
                  const std::vector<std::uint8_t>& y_prime, const LossConfig& config);

/// Per-node score s_i = eta * ||X_hat_i - X_i||_2 + (1 - eta) * hinge_i.
std::vector<double> anomaly_scores(const Matrix& x_hat, const Matrix& x, const Matrix& z,
                                   const Matrix& z_prime, const std::vector<std::uint8_t>& y_prime,
                                   const LossConfig& config);

struct ScoreConfig {
  /// Decision threshold tau on the (normalized) score.
  double threshold = 0.5;
  /// Min-max scale scores to [0,1] before thresholding; a constant score
  /// vector normalizes to all zeros.
  bool normalize_scores = true;
};

struct ScoreReport {
  std::vector<double> raw_scores;
  /// Equal to raw_scores when normalization is disabled.
  std::vector<double> normalized_scores;
  std::vector<std::uint8_t> decisions;
  /// Node indices by descending raw score, ties by ascending index.
  std::vector<int> ranking;
};

/// Thresholded decisions plus the full ranking. Ranking depends only on raw
/// scores; normalization affects decisions alone.
ScoreReport decide(const std::vector<double>& scores, const ScoreConfig& config);

}  // namespace flowsentry
