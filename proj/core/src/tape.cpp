#include "flowsentry/tape.hpp"

#include <cmath>
#include <utility>

#include "flowsentry/error.hpp"

namespace flowsentry {

Tape::Var Tape::push(Matrix value, bool requires_grad,
                     std::function<void(Tape&, const Node&)> backprop) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.backprop = requires_grad ? std::move(backprop) : nullptr;
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) {
    throw BoundsError("tape var out of range");
  }
  return nodes_[v.id];
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

void Tape::accumulate(std::uint32_t id, const Matrix& delta) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  for (std::size_t i = 0; i < delta.size(); ++i) n.grad.data()[i] += delta.data()[i];
}

Matrix Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

Tape::Var Tape::constant(Matrix value) {
  ensure_finite(value, "constant");
  return push(std::move(value), false, nullptr);
}

Tape::Var Tape::leaf(Matrix value) {
  ensure_finite(value, "leaf");
  return push(std::move(value), true, [](Tape&, const Node&) {});
}

Tape::Var Tape::add(Var a, Var b) {
  Matrix out = flowsentry::add(value(a), value(b));
  const bool track = tracks(a) || tracks(b);
  return push(std::move(out), track, [a, b](Tape& t, const Node& self) {
    t.accumulate(a.id, self.grad);
    t.accumulate(b.id, self.grad);
  });
}

Tape::Var Tape::sub(Var a, Var b) {
  Matrix out = flowsentry::sub(value(a), value(b));
  const bool track = tracks(a) || tracks(b);
  return push(std::move(out), track, [a, b](Tape& t, const Node& self) {
    t.accumulate(a.id, self.grad);
    t.accumulate(b.id, flowsentry::scale(self.grad, -1.0));
  });
}

Tape::Var Tape::mul(Var a, Var b) {
  Matrix out = hadamard(value(a), value(b));
  const bool track = tracks(a) || tracks(b);
  return push(std::move(out), track, [a, b](Tape& t, const Node& self) {
    t.accumulate(a.id, hadamard(self.grad, t.value(b)));
    t.accumulate(b.id, hadamard(self.grad, t.value(a)));
  });
}

Tape::Var Tape::matmul(Var a, Var b) {
  Matrix out = flowsentry::matmul(value(a), value(b));
  const bool track = tracks(a) || tracks(b);
  return push(std::move(out), track, [a, b](Tape& t, const Node& self) {
    if (t.tracks(a)) {
      t.accumulate(a.id, flowsentry::matmul(self.grad, transpose(t.value(b))));
    }
    if (t.tracks(b)) {
      t.accumulate(b.id, flowsentry::matmul(transpose(t.value(a)), self.grad));
    }
  });
}

Tape::Var Tape::scale(Var a, double factor) {
  Matrix out = flowsentry::scale(value(a), factor);
  return push(std::move(out), tracks(a), [a, factor](Tape& t, const Node& self) {
    t.accumulate(a.id, flowsentry::scale(self.grad, factor));
  });
}

Tape::Var Tape::add_scalar(Var a, double v) {
  Matrix out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += v;
  ensure_finite(out, "add_scalar");
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    t.accumulate(a.id, self.grad);
  });
}

Tape::Var Tape::add_row(Var a, Var row) {
  const Matrix& m = value(a);
  const Matrix& r = value(row);
  if (r.rows() != 1 || r.cols() != m.cols()) {
    throw ShapeError("add_row expects a 1x" + std::to_string(m.cols()) + " row");
  }
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) += r(0, j);
  }
  ensure_finite(out, "add_row");
  const bool track = tracks(a) || tracks(row);
  return push(std::move(out), track, [a, row](Tape& t, const Node& self) {
    t.accumulate(a.id, self.grad);
    if (t.tracks(row)) {
      Matrix col_sums(1, self.grad.cols());
      for (std::size_t i = 0; i < self.grad.rows(); ++i) {
        for (std::size_t j = 0; j < self.grad.cols(); ++j) col_sums(0, j) += self.grad(i, j);
      }
      t.accumulate(row.id, col_sums);
    }
  });
}

Tape::Var Tape::relu(Var a) {
  Matrix out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = out.data()[i] > 0.0 ? out.data()[i] : 0.0;
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    const Matrix& input = t.value(a);
    Matrix delta(input.rows(), input.cols());
    for (std::size_t i = 0; i < input.size(); ++i) {
      delta.data()[i] = input.data()[i] > 0.0 ? self.grad.data()[i] : 0.0;
    }
    t.accumulate(a.id, delta);
  });
}

Tape::Var Tape::exp(Var a) {
  Matrix out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::exp(out.data()[i]);
  ensure_finite(out, "exp");
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    t.accumulate(a.id, hadamard(self.grad, self.value));
  });
}

Tape::Var Tape::neighbor_mean(Var h, const NeighborLists& neighbors) {
  const Matrix& m = value(h);
  if (neighbors.size() != m.rows()) {
    throw ShapeError("neighbor_mean list count does not match row count");
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t u = 0; u < neighbors.size(); ++u) {
    const auto& nbrs = neighbors[u];
    if (nbrs.empty()) continue;
    const double inv = 1.0 / static_cast<double>(nbrs.size());
    for (const int v : nbrs) {
      for (std::size_t j = 0; j < m.cols(); ++j) out(u, j) += m(static_cast<std::size_t>(v), j);
    }
    for (std::size_t j = 0; j < m.cols(); ++j) out(u, j) *= inv;
  }
  ensure_finite(out, "neighbor_mean");
  return push(std::move(out), tracks(h), [h, neighbors](Tape& t, const Node& self) {
    Matrix delta(self.value.rows(), self.value.cols());
    for (std::size_t u = 0; u < neighbors.size(); ++u) {
      const auto& nbrs = neighbors[u];
      if (nbrs.empty()) continue;
      const double inv = 1.0 / static_cast<double>(nbrs.size());
      for (const int v : nbrs) {
        for (std::size_t j = 0; j < delta.cols(); ++j) {
          delta(static_cast<std::size_t>(v), j) += inv * self.grad(u, j);
        }
      }
    }
    t.accumulate(h.id, delta);
  });
}

Tape::Var Tape::row_softmax(Var a) {
  const Matrix& m = value(a);
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row_max = m(i, 0);
    for (std::size_t j = 1; j < m.cols(); ++j) row_max = std::max(row_max, m(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, j) = std::exp(m(i, j) - row_max);
      sum += out(i, j);
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) *= inv;
  }
  ensure_finite(out, "row_softmax");
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    const Matrix& s = self.value;
    Matrix delta(s.rows(), s.cols());
    for (std::size_t i = 0; i < s.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < s.cols(); ++j) dot += self.grad(i, j) * s(i, j);
      for (std::size_t j = 0; j < s.cols(); ++j) {
        delta(i, j) = s(i, j) * (self.grad(i, j) - dot);
      }
    }
    t.accumulate(a.id, delta);
  });
}

Tape::Var Tape::row_l2(Var a) {
  const Matrix& m = value(a);
  Matrix out(m.rows(), 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) sum += m(i, j) * m(i, j);
    out(i, 0) = std::sqrt(sum);
  }
  ensure_finite(out, "row_l2");
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    const Matrix& input = t.value(a);
    Matrix delta(input.rows(), input.cols());
    for (std::size_t i = 0; i < input.rows(); ++i) {
      const double norm = self.value(i, 0);
      if (norm == 0.0) continue;  // subgradient 0 at the origin
      const double g = self.grad(i, 0) / norm;
      for (std::size_t j = 0; j < input.cols(); ++j) delta(i, j) = g * input(i, j);
    }
    t.accumulate(a.id, delta);
  });
}

Tape::Var Tape::frobenius(Var a) {
  const Matrix& m = value(a);
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += m.data()[i] * m.data()[i];
  Matrix out(1, 1, {std::sqrt(sum)});
  ensure_finite(out, "frobenius");
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    const double norm = self.value(0, 0);
    if (norm == 0.0) return;  // subgradient 0
    const double g = self.grad(0, 0) / norm;
    t.accumulate(a.id, flowsentry::scale(t.value(a), g));
  });
}

Tape::Var Tape::mean_all(Var a) {
  const Matrix& m = value(a);
  if (m.size() == 0) {
    throw ShapeError("mean_all of empty matrix");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += m.data()[i];
  Matrix out(1, 1, {sum / static_cast<double>(m.size())});
  ensure_finite(out, "mean_all");
  return push(std::move(out), tracks(a), [a](Tape& t, const Node& self) {
    const Matrix& input = t.value(a);
    const double g = self.grad(0, 0) / static_cast<double>(input.size());
    Matrix delta(input.rows(), input.cols());
    for (std::size_t i = 0; i < delta.size(); ++i) delta.data()[i] = g;
    t.accumulate(a.id, delta);
  });
}

void Tape::backward(Var loss) {
  const Node& loss_node = node(loss);
  if (loss_node.value.rows() != 1 || loss_node.value.cols() != 1) {
    throw ShapeError("backward expects a 1x1 loss node");
  }
  if (!loss_node.requires_grad) return;
  accumulate(loss.id, Matrix(1, 1, {1.0}));
  for (std::size_t i = nodes_.size(); i > 0; --i) {
    Node& n = nodes_[i - 1];
    if (n.requires_grad && !n.grad.empty() && n.backprop) {
      n.backprop(*this, n);
    }
  }
}

std::map<std::string, Matrix> gradients(Tape& tape, Tape::Var loss,
                                        const std::map<std::string, Tape::Var>& params) {
  ensure_finite(tape.value(loss), "loss");
  tape.backward(loss);
  std::map<std::string, Matrix> out;
  for (const auto& [name, var] : params) {
    Matrix g = tape.grad(var);
    ensure_finite(g, "gradient");
    out.emplace(name, std::move(g));
  }
  return out;
}

}  // namespace flowsentry
