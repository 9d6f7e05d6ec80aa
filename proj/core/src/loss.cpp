#include "flowsentry/loss.hpp"

#include <algorithm>
#include <cmath>

#include "flowsentry/error.hpp"
#include "flowsentry/metrics.hpp"

namespace flowsentry {

namespace {

void validate(const LossConfig& config) {
  if (config.eta < 0.0 || config.eta > 1.0) {
    throw ConfigError("eta must lie in [0,1]");
  }
  if (config.margin < 0.0) {
    throw ConfigError("margin must be non-negative");
  }
}

/// -s_i as an n x 1 column, s_i = 2 y'_i - 1.
Matrix negated_signs(const std::vector<std::uint8_t>& y_prime) {
  Matrix out(y_prime.size(), 1);
  for (std::size_t i = 0; i < y_prime.size(); ++i) {
    out(i, 0) = y_prime[i] ? -1.0 : 1.0;
  }
  return out;
}

}  // namespace

Tape::Var reconstruction_loss(Tape& tape, Tape::Var x_hat, Tape::Var x) {
  return tape.frobenius(tape.sub(x_hat, x));
}

double reconstruction_loss(const Matrix& x_hat, const Matrix& x) {
  Tape tape;
  return tape.value(reconstruction_loss(tape, tape.constant(x_hat), tape.constant(x)))(0, 0);
}

Tape::Var margin_loss(Tape& tape, Tape::Var z, Tape::Var z_prime,
                      const std::vector<std::uint8_t>& y_prime, double lambda) {
  if (lambda < 0.0) {
    throw ConfigError("margin must be non-negative");
  }
  if (tape.value(z).rows() != y_prime.size()) {
    throw ShapeError("pseudo-label count does not match latent rows");
  }
  const Tape::Var distances = tape.row_l2(tape.sub(z, z_prime));
  const Tape::Var hinge_arg =
      tape.add_scalar(tape.mul(distances, tape.constant(negated_signs(y_prime))), lambda);
  return tape.mean_all(tape.relu(hinge_arg));
}

double margin_loss(const Matrix& z, const Matrix& z_prime,
                   const std::vector<std::uint8_t>& y_prime, double lambda) {
  Tape tape;
  return tape.value(
      margin_loss(tape, tape.constant(z), tape.constant(z_prime), y_prime, lambda))(0, 0);
}

Tape::Var total_loss(Tape& tape, Tape::Var x_hat, Tape::Var x, Tape::Var z, Tape::Var z_prime,
                     const std::vector<std::uint8_t>& y_prime, const LossConfig& config) {
  validate(config);
  const Tape::Var reconstruction = reconstruction_loss(tape, x_hat, x);
  const Tape::Var margin = margin_loss(tape, z, z_prime, y_prime, config.margin);
  return tape.add(tape.scale(reconstruction, config.eta), tape.scale(margin, 1.0 - config.eta));
}

double total_loss(const Matrix& x_hat, const Matrix& x, const Matrix& z, const Matrix& z_prime,
                  const std::vector<std::uint8_t>& y_prime, const LossConfig& config) {
  Tape tape;
  return tape.value(total_loss(tape, tape.constant(x_hat), tape.constant(x), tape.constant(z),
                               tape.constant(z_prime), y_prime, config))(0, 0);
}

std::vector<double> anomaly_scores(const Matrix& x_hat, const Matrix& x, const Matrix& z,
                                   const Matrix& z_prime, const std::vector<std::uint8_t>& y_prime,
                                   const LossConfig& config) {
  validate(config);
  if (!x_hat.same_shape(x)) {
    throw ShapeError("reconstruction shape does not match features");
  }
  if (!z.same_shape(z_prime)) {
    throw ShapeError("latent views differ in shape");
  }
  const std::size_t n = x.rows();
  if (z.rows() != n || y_prime.size() != n) {
    throw ShapeError("latent rows and pseudo-labels must match node count");
  }
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    double recon_sq = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double diff = x_hat(i, j) - x(i, j);
      recon_sq += diff * diff;
    }
    double dist_sq = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const double diff = z(i, j) - z_prime(i, j);
      dist_sq += diff * diff;
    }
    const double sign = y_prime[i] ? 1.0 : -1.0;
    const double hinge = std::max(0.0, -sign * std::sqrt(dist_sq) + config.margin);
    scores[i] = config.eta * std::sqrt(recon_sq) + (1.0 - config.eta) * hinge;
    if (!std::isfinite(scores[i])) {
      throw NumericError("non-finite anomaly score at node " + std::to_string(i));
    }
  }
  return scores;
}

ScoreReport decide(const std::vector<double>& scores, const ScoreConfig& config) {
  if (scores.empty()) {
    throw ShapeError("decide needs at least one score");
  }
  if (config.threshold < 0.0 || config.threshold > 1.0) {
    throw ConfigError("threshold must lie in [0,1]");
  }
  ScoreReport report;
  report.raw_scores = scores;
  if (config.normalize_scores) {
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    report.normalized_scores.resize(scores.size(), 0.0);
    if (hi > lo) {
      const double inv = 1.0 / (hi - lo);
      for (std::size_t i = 0; i < scores.size(); ++i) {
        report.normalized_scores[i] = (scores[i] - lo) * inv;
      }
    }
  } else {
    report.normalized_scores = scores;
  }
  report.decisions.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    report.decisions[i] = report.normalized_scores[i] > config.threshold ? 1 : 0;
  }
  report.ranking = rank_descending(scores);
  return report;
}

}  // namespace flowsentry
