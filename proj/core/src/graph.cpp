#include "flowsentry/graph.hpp"

#include <atomic>
#include <cmath>

#include "flowsentry/error.hpp"

namespace flowsentry {

namespace {

thread_local int guard_depth = 0;
std::atomic<std::uint64_t> blocked_reads{0};

}  // namespace

LabelAccessGuard::LabelAccessGuard() { ++guard_depth; }
LabelAccessGuard::~LabelAccessGuard() { --guard_depth; }
bool LabelAccessGuard::active() { return guard_depth > 0; }
std::uint64_t LabelAccessGuard::blocked_read_count() { return blocked_reads.load(); }

WorkflowGraph::WorkflowGraph(std::string id, Matrix adjacency, Matrix features,
                             std::vector<std::string> node_ids,
                             std::optional<std::vector<std::uint8_t>> labels)
    : id_(std::move(id)),
      adjacency_(std::move(adjacency)),
      features_(std::move(features)),
      node_ids_(std::move(node_ids)),
      labels_(std::move(labels)) {
  const std::size_t n = features_.rows();
  if (n == 0) {
    throw DataError("graph '" + id_ + "' has no nodes");
  }
  if (adjacency_.rows() != n || adjacency_.cols() != n) {
    throw ShapeError("graph '" + id_ + "': adjacency must be " + std::to_string(n) + "x" +
                     std::to_string(n));
  }
  if (node_ids_.size() != n) {
    throw ShapeError("graph '" + id_ + "': node id count does not match node count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0) {
      throw DataError("graph '" + id_ + "': nonzero diagonal at node " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency_(i, j);
      if (a != 0.0 && a != 1.0) {
        throw DataError("graph '" + id_ + "': adjacency entry not in {0,1}");
      }
      if (a != adjacency_(j, i)) {
        throw DataError("graph '" + id_ + "': adjacency not symmetric");
      }
    }
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!std::isfinite(features_.data()[i])) {
      throw DataError("graph '" + id_ + "': non-finite feature value");
    }
  }
  if (labels_) {
    if (labels_->size() != n) {
      throw ShapeError("graph '" + id_ + "': label count does not match node count");
    }
    for (const auto label : *labels_) {
      if (label != 0 && label != 1) {
        throw DataError("graph '" + id_ + "': label not in {0,1}");
      }
    }
  }
  neighbor_lists_.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (adjacency_(u, v) == 1.0) neighbor_lists_[u].push_back(static_cast<int>(v));
    }
  }
}

const std::vector<std::uint8_t>& WorkflowGraph::labels() const {
  if (LabelAccessGuard::active()) {
    blocked_reads.fetch_add(1);
    throw TrainingError("ground-truth labels read inside the training path (graph '" + id_ + "')");
  }
  if (!labels_) {
    throw EvaluationError("graph '" + id_ + "' has no labels");
  }
  return *labels_;
}

const std::vector<int>& WorkflowGraph::neighbors(int u) const {
  if (u < 0 || static_cast<std::size_t>(u) >= node_count()) {
    throw BoundsError("node index " + std::to_string(u) + " out of range for graph '" + id_ + "'");
  }
  return neighbor_lists_[static_cast<std::size_t>(u)];
}

Matrix symmetrize(const Matrix& raw_adjacency) {
  if (raw_adjacency.rows() != raw_adjacency.cols()) {
    throw FormatError("adjacency must be square, got " + std::to_string(raw_adjacency.rows()) +
                      "x" + std::to_string(raw_adjacency.cols()));
  }
  const std::size_t n = raw_adjacency.rows();
  for (std::size_t i = 0; i < raw_adjacency.size(); ++i) {
    const double v = raw_adjacency.data()[i];
    if (v != 0.0 && v != 1.0) {
      throw FormatError("adjacency entries must be 0 or 1");
    }
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (raw_adjacency(i, j) == 1.0 || raw_adjacency(j, i) == 1.0) {
        out(i, j) = 1.0;
        out(j, i) = 1.0;
      }
    }
  }
  return out;
}

Matrix normalize_columns(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n == 0) {
    throw DataError("cannot normalize an empty feature matrix");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(features(i, j))) {
        throw DataError("non-finite feature at row " + std::to_string(i) + ", column " +
                        std::to_string(j));
      }
    }
  }
  Matrix out(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = features(0, j);
    double hi = features(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, features(i, j));
      hi = std::max(hi, features(i, j));
    }
    if (hi == lo) continue;  // constant column -> zeros
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < n; ++i) {
      out(i, j) = (features(i, j) - lo) * inv;
    }
  }
  return out;
}

Matrix shift_columns_to_zero(const Matrix& features, const std::vector<std::size_t>& columns) {
  Matrix out = features;
  for (const std::size_t j : columns) {
    if (j >= features.cols()) {
      throw BoundsError("shift column " + std::to_string(j) + " out of range");
    }
    double lo = features(0, j);
    for (std::size_t i = 1; i < features.rows(); ++i) lo = std::min(lo, features(i, j));
    for (std::size_t i = 0; i < features.rows(); ++i) out(i, j) = features(i, j) - lo;
  }
  return out;
}

}  // namespace flowsentry
