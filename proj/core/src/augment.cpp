#include "flowsentry/augment.hpp"

#include <cmath>
#include <string>

#include "flowsentry/error.hpp"
#include "flowsentry/rng.hpp"

namespace flowsentry {

namespace {

void validate(const AugmentConfig& config) {
  if (config.selection_rate < 0.0 || config.selection_rate > 1.0) {
    throw ConfigError("selection rate must lie in [0,1], got " +
                      std::to_string(config.selection_rate));
  }
  if (!(config.scale_factor > 0.0) || config.scale_factor == 1.0) {
    throw ConfigError("scale factor must be positive and != 1");
  }
}

}  // namespace

std::vector<std::uint8_t> draw_mask(const std::vector<double>& p, double selection_rate) {
  std::vector<std::uint8_t> mask(p.size(), 0);
  if (selection_rate == 0.0) return mask;
  const double lo = 0.5 * selection_rate;
  const double hi = 0.75 * selection_rate;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mask[i] = (p[i] >= lo && p[i] <= hi) ? 1 : 0;
  }
  return mask;
}

Matrix neighbor_swap(const WorkflowGraph& graph, const std::vector<std::uint8_t>& mask) {
  const std::size_t n = graph.node_count();
  if (mask.size() != n) {
    throw ShapeError("swap mask length does not match node count");
  }
  const Matrix& x = graph.features();
  Matrix out = x;
  for (std::size_t u = 0; u < n; ++u) {
    if (!mask[u]) continue;
    const auto& nbrs = graph.neighbors(static_cast<int>(u));
    if (nbrs.empty()) continue;
    int best = -1;
    double best_dist = 0.0;
    for (const int v : nbrs) {
      double dist = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double diff = x(u, j) - x(static_cast<std::size_t>(v), j);
        dist += diff * diff;
      }
      // strict < keeps the lowest-indexed neighbor on ties (lists are sorted)
      if (best < 0 || dist < best_dist) {
        best = v;
        best_dist = dist;
      }
    }
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(u, j) = x(static_cast<std::size_t>(best), j);
    }
  }
  return out;
}

Matrix group_scale(const Matrix& features, const std::vector<std::uint8_t>& up_mask,
                   const std::vector<std::uint8_t>& down_mask, double factor) {
  if (up_mask.size() != features.rows() || down_mask.size() != features.rows()) {
    throw ShapeError("scale mask length does not match row count");
  }
  if (!(factor > 0.0) || factor == 1.0) {
    throw ConfigError("scale factor must be positive and != 1");
  }
  for (std::size_t i = 0; i < up_mask.size(); ++i) {
    if (up_mask[i] && down_mask[i]) {
      throw ConfigError("scale masks overlap at row " + std::to_string(i));
    }
  }
  Matrix out = features;
  const double inv = 1.0 / factor;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    if (!up_mask[i] && !down_mask[i]) continue;
    const double f = up_mask[i] ? factor : inv;
    for (std::size_t j = 0; j < features.cols(); ++j) out(i, j) *= f;
  }
  return out;
}

AugmentationResult augment(const WorkflowGraph& graph, const AugmentConfig& config) {
  validate(config);
  Rng rng(config.seed);
  std::vector<double> p(graph.node_count());
  for (auto& v : p) v = rng.uniform();
  return augment_with_draws(graph, config, std::move(p));
}

AugmentationResult augment_with_draws(const WorkflowGraph& graph, const AugmentConfig& config,
                                      std::vector<double> p) {
  validate(config);
  const std::size_t n = graph.node_count();
  if (p.size() != n) {
    throw ShapeError("p-vector length does not match node count");
  }
  const double r = config.selection_rate;

  AugmentationResult result;
  result.p = std::move(p);
  result.y_prime.assign(n, 0);
  result.swap_mask.assign(n, 0);
  result.up_mask.assign(n, 0);
  result.down_mask.assign(n, 0);

  if (r > 0.0) {
    const double swap_lo = config.strict_mask_band ? 0.5 * r : 0.25 * r;
    const double swap_hi = 0.75 * r;
    for (std::size_t i = 0; i < n; ++i) {
      const double pi = result.p[i];
      result.y_prime[i] = pi < r ? 1 : 0;
      result.up_mask[i] = pi < 0.25 * r ? 1 : 0;
      result.swap_mask[i] = (pi >= swap_lo && pi <= swap_hi) ? 1 : 0;
      result.down_mask[i] = (pi > swap_hi && pi < r) ? 1 : 0;
    }
  }

  result.x_prime = group_scale(neighbor_swap(graph, result.swap_mask), result.up_mask,
                               result.down_mask, config.scale_factor);
  return result;
}

}  // namespace flowsentry
