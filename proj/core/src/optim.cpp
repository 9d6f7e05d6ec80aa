#include "flowsentry/optim.hpp"

#include <cmath>

#include "flowsentry/error.hpp"

namespace flowsentry {

void ParameterStore::insert(const std::string& name, Matrix value) {
  Entry entry;
  entry.first_moment = Matrix(value.rows(), value.cols());
  entry.second_moment = Matrix(value.rows(), value.cols());
  entry.value = std::move(value);
  entries_[name] = std::move(entry);
}

bool ParameterStore::contains(const std::string& name) const { return entries_.count(name) > 0; }

ParameterStore::Entry& ParameterStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw BoundsError("unknown parameter '" + name + "'");
  }
  return it->second;
}

const ParameterStore::Entry& ParameterStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw BoundsError("unknown parameter '" + name + "'");
  }
  return it->second;
}

Matrix& ParameterStore::value(const std::string& name) { return entry(name).value; }
const Matrix& ParameterStore::value(const std::string& name) const { return entry(name).value; }
Matrix& ParameterStore::first_moment(const std::string& name) { return entry(name).first_moment; }
const Matrix& ParameterStore::first_moment(const std::string& name) const {
  return entry(name).first_moment;
}
Matrix& ParameterStore::second_moment(const std::string& name) { return entry(name).second_moment; }
const Matrix& ParameterStore::second_moment(const std::string& name) const {
  return entry(name).second_moment;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

void adam_step(ParameterStore& params, const std::map<std::string, Matrix>& grads,
               double learning_rate, double weight_decay, const AdamSettings& settings) {
  params.increment_step();
  const auto step = static_cast<double>(params.step_count());
  const double bias1 = 1.0 - std::pow(settings.beta1, step);
  const double bias2 = 1.0 - std::pow(settings.beta2, step);

  for (const auto& [name, grad] : grads) {
    Matrix& theta = params.value(name);
    if (!theta.same_shape(grad)) {
      throw ShapeError("gradient shape mismatch for parameter '" + name + "'");
    }
    Matrix& m = params.first_moment(name);
    Matrix& v = params.second_moment(name);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = grad.data()[i] + weight_decay * theta.data()[i];
      m.data()[i] = settings.beta1 * m.data()[i] + (1.0 - settings.beta1) * g;
      v.data()[i] = settings.beta2 * v.data()[i] + (1.0 - settings.beta2) * g * g;
      const double m_hat = m.data()[i] / bias1;
      const double v_hat = v.data()[i] / bias2;
      theta.data()[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + settings.epsilon);
    }
    ensure_finite(theta, "adam_step");
  }
}

}  // namespace flowsentry
