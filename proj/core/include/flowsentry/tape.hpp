#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flowsentry/matrix.hpp"

namespace flowsentry {

using NeighborLists = std::vector<std::vector<int>>;

/// Reverse-mode differentiation over dense matrices. A forward computation is
/// recorded as a sequence of nodes; backward() replays it in reverse and
/// accumulates d(loss)/d(node) for every gradient-tracked node.
///
/// Scalars are 1x1 matrices. Constants (inputs, noise draws, masks) carry no
/// gradient; randomness is therefore held fixed during differentiation.
class Tape {
 public:
  struct Var {
    std::uint32_t id = UINT32_MAX;
  };

  Var constant(Matrix value);
  /// Gradient-tracked input, typically a model parameter.
  Var leaf(Matrix value);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var matmul(Var a, Var b);
  Var scale(Var a, double factor);
  Var add_scalar(Var a, double value);
  /// Broadcasts a 1xc row over every row of a (n x c).
  Var add_row(Var a, Var row);
  Var relu(Var a);
  Var exp(Var a);
  /// out[u] = mean of the rows of h listed in neighbors[u]; zero row when the
  /// list is empty.
  Var neighbor_mean(Var h, const NeighborLists& neighbors);
  /// Row-wise softmax with internal max subtraction for stability.
  Var row_softmax(Var a);
  /// n x c -> n x 1 Euclidean norm of each row.
  Var row_l2(Var a);
  /// Frobenius norm, 1x1 output.
  Var frobenius(Var a);
  /// Mean over all entries, 1x1 output.
  Var mean_all(Var a);

  const Matrix& value(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

  /// Reverse pass from a 1x1 node. Gradients accumulate; call once per tape.
  void backward(Var loss);
  /// Gradient of the last backward() target w.r.t. v; zeros if untouched.
  Matrix grad(Var v) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Tape&, const Node&)> backprop;
  };

  Var push(Matrix value, bool requires_grad, std::function<void(Tape&, const Node&)> backprop);
  void accumulate(std::uint32_t id, const Matrix& delta);
  const Node& node(Var v) const;
  bool tracks(Var v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
};

/// Gradients of `loss` with respect to each named leaf. Missing gradients
/// (parameters the loss does not depend on) come back as zero matrices.
std::map<std::string, Matrix> gradients(Tape& tape, Tape::Var loss,
                                        const std::map<std::string, Tape::Var>& params);

}  // namespace flowsentry
