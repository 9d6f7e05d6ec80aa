#pragma once

#include <cstdint>
#include <vector>

#include "flowsentry/graph.hpp"
#include "flowsentry/matrix.hpp"

namespace flowsentry {

struct AugmentConfig {
  /// Selection rate r in [0, 1]: the expected fraction of perturbed nodes.
  double selection_rate = 0.3;
  /// Multiplier for the scale-up group; the scale-down group uses its
  /// reciprocal. Must be positive and != 1.
  double scale_factor = 1.5;
  std::uint64_t seed = 0;
  /// Selects the literal mask band [r/2, 3r/4] for the swap group. The
  /// default widens it to [r/4, 3r/4] so that every pseudo-positive node is
  /// actually modified (see README).
  bool strict_mask_band = false;
};

struct AugmentationResult {
  Matrix x_prime;                     // transformed feature matrix
  std::vector<std::uint8_t> y_prime;  // pseudo-labels, 1 iff p[i] < r
  std::vector<double> p;              // the uniform draws behind everything
  std::vector<std::uint8_t> swap_mask;
  std::vector<std::uint8_t> up_mask;
  std::vector<std::uint8_t> down_mask;
};

/// Selection mask m[i] = (p[i] >= r/2) and (p[i] <= 3r/4). r = 0 selects
/// nothing (the band degenerates to a point there).
std::vector<std::uint8_t> draw_mask(const std::vector<double>& p, double selection_rate);

/// Replaces each masked node's feature row with the row of its nearest
/// neighbor (Euclidean distance, ties broken toward the lowest node index).
/// All distances read the original matrix. Isolated masked nodes pass
/// through unchanged.
Matrix neighbor_swap(const WorkflowGraph& graph, const std::vector<std::uint8_t>& mask);

/// Multiplies up-masked rows by factor and down-masked rows by 1/factor.
/// Overlapping masks are a ConfigError.
Matrix group_scale(const Matrix& features, const std::vector<std::uint8_t>& up_mask,
                   const std::vector<std::uint8_t>& down_mask, double factor);

/// Full transformation: one seeded p-vector drives the three disjoint masks
/// (scale-up on [0, r/4), swap on the band, scale-down on (3r/4, r)) and the
/// pseudo-labels y'[i] = p[i] < r.
AugmentationResult augment(const WorkflowGraph& graph, const AugmentConfig& config);

/// augment() over an explicit p-vector; exposed so tests and the trainer can
/// reproduce a recorded draw.
AugmentationResult augment_with_draws(const WorkflowGraph& graph, const AugmentConfig& config,
                                      std::vector<double> p);

}  // namespace flowsentry
