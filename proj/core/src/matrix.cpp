#include "flowsentry/matrix.hpp"

#include <cmath>
#include <string>

#include "flowsentry/error.hpp"

namespace flowsentry {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw FormatError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                      std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw FormatError("ragged initializer rows");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

void ensure_finite(const Matrix& m, const char* op) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) {
      throw NumericError(std::string("non-finite value in ") + op);
    }
  }
}

namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + " shape mismatch: " + shape_str(a) + " vs " + shape_str(b));
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul inner dimensions disagree: " + shape_str(a) + " * " + shape_str(b));
  }
  ensure_finite(a, "matmul");
  ensure_finite(b, "matmul");
  Matrix out(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.data() + i * out.cols();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* b_row = b.data() + k * b.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out_row[j] += aik * b_row[j];
      }
    }
  }
  ensure_finite(out, "matmul");
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  ensure_finite(a, "add");
  ensure_finite(b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  ensure_finite(out, "add");
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  ensure_finite(a, "sub");
  ensure_finite(b, "sub");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  ensure_finite(out, "sub");
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  ensure_finite(a, "hadamard");
  ensure_finite(b, "hadamard");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  ensure_finite(out, "hadamard");
  return out;
}

Matrix scale(const Matrix& a, double factor) {
  ensure_finite(a, "scale");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * factor;
  ensure_finite(out, "scale");
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(j, i) = a(i, j);
    }
  }
  return out;
}

}  // namespace flowsentry
