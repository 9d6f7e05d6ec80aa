#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowsentry/matrix.hpp"

namespace flowsentry {

/// While a guard is alive on the current thread, any read of ground-truth
/// labels throws TrainingError. The training loop holds one around its loss
/// path so that label leakage is a hard failure, not a code-review hope.
class LabelAccessGuard {
 public:
  LabelAccessGuard();
  ~LabelAccessGuard();
  LabelAccessGuard(const LabelAccessGuard&) = delete;
  LabelAccessGuard& operator=(const LabelAccessGuard&) = delete;

  static bool active();
  /// Count of label reads attempted while a guard was active (all threads).
  static std::uint64_t blocked_read_count();
};

/// One attributed workflow DAG execution, preprocessed: adjacency symmetric
/// with zero diagonal, features finite. Immutable after construction.
class WorkflowGraph {
 public:
  WorkflowGraph(std::string id, Matrix adjacency, Matrix features,
                std::vector<std::string> node_ids,
                std::optional<std::vector<std::uint8_t>> labels = std::nullopt);

  const std::string& id() const { return id_; }
  std::size_t node_count() const { return features_.rows(); }
  std::size_t feature_dim() const { return features_.cols(); }
  const Matrix& adjacency() const { return adjacency_; }
  const Matrix& features() const { return features_; }
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  bool has_labels() const { return labels_.has_value(); }
  /// Ground-truth anomaly labels; throws TrainingError when read under an
  /// active LabelAccessGuard and EvaluationError when absent.
  const std::vector<std::uint8_t>& labels() const;

  /// Sorted adjacency list of u; BoundsError when u is out of range.
  const std::vector<int>& neighbors(int u) const;
  const std::vector<std::vector<int>>& neighbor_lists() const { return neighbor_lists_; }

 private:
  std::string id_;
  Matrix adjacency_;
  Matrix features_;
  std::vector<std::string> node_ids_;
  std::optional<std::vector<std::uint8_t>> labels_;
  std::vector<std::vector<int>> neighbor_lists_;
};

/// Union of each directed edge with its reverse; zero diagonal (self-loops
/// dropped). FormatError on non-square input or entries outside {0, 1}.
Matrix symmetrize(const Matrix& raw_adjacency);

/// Min-max rescales every column to [0, 1]; constant columns map to zeros.
/// DataError naming row/column on non-finite input.
Matrix normalize_columns(const Matrix& features);

/// Subtracts each flagged column's minimum from that column (applied to
/// timestamp columns before normalization so absolute epochs line up).
Matrix shift_columns_to_zero(const Matrix& features, const std::vector<std::size_t>& columns);

}  // namespace flowsentry
